#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "residue/encoders.hpp"

namespace residue {

enum class OutputActivation {
    sigmoid,     // per-class logistic, binary cross-entropy summed over classes
    sine_shift,  // 0.5 + 0.5 sin(z), same per-class cross-entropy
    softmax,     // categorical cross-entropy
};

std::string_view to_string(OutputActivation a);
OutputActivation parse_output_activation(std::string_view name);

struct MlpConfig {
    int input_dim = 1;
    std::vector<int> hidden{64, 32};
    int output_dim = 2;
    OutputActivation output_activation = OutputActivation::sigmoid;
    double learning_rate = 0.05;
    int epochs = 30;
    int batch_size = 64;
    std::uint64_t seed = 0;
    /// Trailing share of the training rows held out for per-epoch accuracy.
    double validation_fraction = 0.1;
    /// Informational tag naming the feature encoding the model expects.
    std::string encoder;
};

/// Throws Error(invalid-config) on non-positive sizes or rates.
void validate(const MlpConfig& c);

struct DenseLayer {
    Eigen::MatrixXd weights;  // fan_in x fan_out
    Eigen::VectorXd bias;     // fan_out
};

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;
    double val_accuracy = 0.0;
};

struct MlpModel {
    MlpConfig config;
    std::vector<DenseLayer> layers;
    std::vector<EpochRecord> history;

    std::size_t parameter_count() const;
};

/// Glorot-uniform weights, U(-s, s) with s = sqrt(6 / (fan_in + fan_out)),
/// drawn layer by layer (row-major) from SplitMix64(config.seed); zero biases.
MlpModel init(const MlpConfig& config);

/// ReLU hidden layers, configured output activation. Throws
/// Error(dimension-mismatch) when the input length differs from input_dim.
Eigen::VectorXd forward(const MlpModel& m, std::span<const double> features);
Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::Ref<const FeatureRowMatrix>& inputs);

/// Per-sample loss for the configured output activation.
double sample_loss(const MlpModel& m, std::span<const double> features, std::uint64_t label);

/// Gradients of sample_loss, laid out like the model's layers.
std::vector<DenseLayer> gradients(const MlpModel& m, std::span<const double> features,
                                  std::uint64_t label);

/// Mini-batch SGD on the leading (1 - validation_fraction) share of rows,
/// reshuffled each epoch with a seed-derived stream; the trailing rows give
/// the per-epoch validation accuracy. Throws Error(label-out-of-range) and
/// Error(dimension-mismatch).
MlpModel train(MlpModel m, const FeatureRowMatrix& inputs, std::span<const std::uint64_t> labels);
/// Applies the network input scaling of the matrix's encoder first.
MlpModel train(MlpModel m, const FeatureMatrix& features);

/// Analytic vs central-difference (step 1e-5) gradients over a deterministic
/// sample of at least 100 parameters (all of them when fewer). Returns the
/// max of |a - n| / max(|a| + |n|, 1e-6).
double grad_check(const MlpModel& m, std::span<const double> features, std::uint64_t label);

/// Argmax accuracy (first maximum wins ties).
double evaluate(const MlpModel& m, const FeatureRowMatrix& inputs, std::span<const std::uint64_t> labels);
double evaluate(const MlpModel& m, const FeatureMatrix& features);

/// Config header followed by one line per layer tensor.
std::string serialize(const MlpModel& m);
MlpModel parse_mlp_model(const std::string& text);

/// `epoch,loss,val_accuracy`.
std::string history_csv(const MlpModel& m);

}  // namespace residue
