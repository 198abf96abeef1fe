#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "residue/encoders.hpp"
#include "residue/fourier.hpp"
#include "residue/keyvalue.hpp"
#include "residue/mlp.hpp"

namespace residue {

std::string_view version_string();

enum class ModelKind { fourier, fourier_closed_form, mlp };
std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view name);

struct ExperimentConfig {
    std::uint64_t p = 3;
    EncoderKind encoder = EncoderKind::raw;
    ModelKind model = ModelKind::fourier;
    std::size_t count = 30000;
    double train_fraction = 25000.0 / 30000.0;
    /// Each replicate generates its dataset from this seed; the network seed
    /// is derived from it.
    std::vector<std::uint64_t> replicate_seeds{1};

    // fourier
    double round_tolerance = kDefaultRoundTolerance;
    BasisTerms terms = BasisTerms::sine_cosine;
    bool extended_basis = false;

    // mlp
    std::vector<int> hidden{64, 32};
    OutputActivation output_activation = OutputActivation::sigmoid;
    double learning_rate = 0.05;
    int epochs = 30;
    int batch_size = 64;
};

/// Throws Error(invalid-config).
void validate(const ExperimentConfig& c);

/// Flat key=value form; keys match the CLI flag names with '-' -> '_'.
KeyValues to_key_values(const ExperimentConfig& c);
/// Starts from `base` and applies every key present in `kv`; unknown keys
/// raise Error(invalid-config).
ExperimentConfig apply_key_values(ExperimentConfig base, const KeyValues& kv);

/// Fourier mod-p protocol: 30,000 samples, first 25,000 fit, rest test.
ExperimentConfig fourier_protocol(std::uint64_t p, std::uint64_t seed = 1);
/// Network protocol: 50,000 samples, 10% trailing validation, three replicates.
ExperimentConfig mlp_protocol(std::uint64_t p, EncoderKind encoder);

struct ReplicateResult {
    std::uint64_t seed = 0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    double accuracy = 0.0;
    double seconds = 0.0;
    /// Serialized model (Fourier key=value or MLP dump).
    std::string model_text;
    /// Training history CSV for networks, empty otherwise.
    std::string history;
    /// Extra fit diagnostics for Fourier models.
    std::optional<FitSummary> diagnostics;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<ReplicateResult> replicates;
    double mean_accuracy = 0.0;
    /// Sample standard deviation (n - 1); 0 for a single replicate.
    double std_accuracy = 0.0;
    std::string version;
};

/// generate -> split -> encode -> fit -> evaluate per replicate, then
/// aggregate. Replicates run concurrently; the result is independent of
/// scheduling. Errors are rethrown with the replicate seed in the message.
ExperimentReport run(const ExperimentConfig& config);

double mean(std::span<const double> v);
double sample_std(std::span<const double> v);

/// Config echo, one row per replicate, aggregate rows and a footer noting
/// the standard deviation convention. Contains no timings.
std::string report_csv(const ExperimentReport& r);

struct TableFile {
    std::string name;  // file name, e.g. "table5.csv"
    std::string csv;
};

struct TableBundle {
    std::string table;
    std::vector<ExperimentReport> reports;
    std::vector<TableFile> files;
    bool all_pass = true;
};

const std::vector<std::string>& table_names();
/// Runs the pre-registered configurations of a published table. Throws
/// Error(unknown-table) listing the valid names.
TableBundle reproduce_table(std::string_view name);
void write_bundle(const TableBundle& b, const std::filesystem::path& dir);

enum class PlotKind { sawtooth, fitted_curve };
PlotKind parse_plot_kind(std::string_view name);

struct Grid {
    double start = 0.0;
    double stop = 1.0;
    double step = 0.01;
};

/// Grid points start + i*step for i = 0.. while within stop. A last point that
/// lands on stop up to rounding is kept and clamped to stop.
std::vector<double> grid_points(const Grid& g);

/// `x,value` rows. For fitted_curve the model is fit with the Fourier protocol
/// (or the closed form when `closed_form` is set). Throws Error(invalid-grid).
std::string emit_plot_data(PlotKind kind, Modulus p, const Grid& grid, bool closed_form = false);
std::string emit_plot_data(const FourierModel& m, const Grid& grid);

}  // namespace residue
