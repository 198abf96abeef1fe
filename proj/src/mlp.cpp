#include "residue/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "residue/error.hpp"
#include "residue/keyvalue.hpp"
#include "residue/rng.hpp"

namespace residue {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;
constexpr std::uint64_t kGradCheckStream = 0x47524144ULL;

struct Activations {
    // a[0] is the input; a[l+1] is the output of layer l. z[l] is its pre-activation.
    std::vector<Eigen::MatrixXd> a;
    std::vector<Eigen::MatrixXd> z;
};

Activations run_forward(const MlpModel& m, const Eigen::MatrixXd& input) {
    Activations act;
    act.a.reserve(m.layers.size() + 1);
    act.z.reserve(m.layers.size());
    act.a.push_back(input);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& layer = m.layers[l];
        Eigen::MatrixXd z = act.a.back() * layer.weights;
        z.rowwise() += layer.bias.transpose();
        const bool last = l + 1 == m.layers.size();
        Eigen::MatrixXd out;
        if (!last) {
            out = z.cwiseMax(0.0);
        } else {
            switch (m.config.output_activation) {
                case OutputActivation::sigmoid:
                    out = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
                    break;
                case OutputActivation::sine_shift:
                    out = z.unaryExpr([](double v) { return 0.5 + 0.5 * std::sin(v); });
                    break;
                case OutputActivation::softmax: {
                    out.resize(z.rows(), z.cols());
                    for (Eigen::Index r = 0; r < z.rows(); ++r) {
                        const double mx = z.row(r).maxCoeff();
                        out.row(r) = (z.row(r).array() - mx).exp();
                        out.row(r) /= out.row(r).sum();
                    }
                    break;
                }
            }
        }
        act.z.push_back(std::move(z));
        act.a.push_back(std::move(out));
    }
    return act;
}

double softplus(double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); }

/// Loss of one output row against its label.
double row_loss(OutputActivation kind, const Eigen::Ref<const Eigen::RowVectorXd>& z,
                const Eigen::Ref<const Eigen::RowVectorXd>& out, std::uint64_t label) {
    double loss = 0.0;
    switch (kind) {
        case OutputActivation::sigmoid:
            for (Eigen::Index k = 0; k < z.size(); ++k)
                loss += softplus(z(k)) - (static_cast<std::uint64_t>(k) == label ? z(k) : 0.0);
            break;
        case OutputActivation::sine_shift:
            for (Eigen::Index k = 0; k < z.size(); ++k) {
                const double o = std::clamp(out(k), kProbFloor, 1.0 - kProbFloor);
                loss -= static_cast<std::uint64_t>(k) == label ? std::log(o) : std::log1p(-o);
            }
            break;
        case OutputActivation::softmax: {
            const double mx = z.maxCoeff();
            loss = mx + std::log((z.array() - mx).exp().sum()) - z(static_cast<Eigen::Index>(label));
            break;
        }
    }
    return loss;
}

/// dLoss/dz at the output for a batch (not yet averaged).
Eigen::MatrixXd output_delta(OutputActivation kind, const Eigen::MatrixXd& z, const Eigen::MatrixXd& out,
                             std::span<const std::uint64_t> labels) {
    Eigen::MatrixXd d = out;
    if (kind == OutputActivation::sine_shift) {
        for (Eigen::Index r = 0; r < d.rows(); ++r) {
            for (Eigen::Index k = 0; k < d.cols(); ++k) {
                const double o = out(r, k);
                const double t = static_cast<std::uint64_t>(k) == labels[static_cast<std::size_t>(r)] ? 1.0 : 0.0;
                // The clamped loss is flat outside [floor, 1 - floor].
                if (o < kProbFloor || o > 1.0 - kProbFloor) {
                    d(r, k) = 0.0;
                } else {
                    d(r, k) = (o - t) / (o * (1.0 - o)) * 0.5 * std::cos(z(r, k));
                }
            }
        }
        return d;
    }
    // sigmoid + BCE and softmax + CE share the form out - onehot.
    for (Eigen::Index r = 0; r < d.rows(); ++r) d(r, static_cast<Eigen::Index>(labels[static_cast<std::size_t>(r)])) -= 1.0;
    return d;
}

/// Gradients averaged over the batch.
std::vector<DenseLayer> backward(const MlpModel& m, const Activations& act, std::span<const std::uint64_t> labels) {
    const auto L = m.layers.size();
    std::vector<DenseLayer> grads(L);
    const double inv = 1.0 / static_cast<double>(labels.size());
    Eigen::MatrixXd delta = output_delta(m.config.output_activation, act.z.back(), act.a.back(), labels) * inv;
    for (std::size_t l = L; l-- > 0;) {
        grads[l].weights = act.a[l].transpose() * delta;
        grads[l].bias = delta.colwise().sum().transpose();
        if (l > 0) {
            Eigen::MatrixXd back = delta * m.layers[l].weights.transpose();
            delta = back.cwiseProduct((act.z[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return grads;
}

void check_labels(std::span<const std::uint64_t> labels, int output_dim) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= static_cast<std::uint64_t>(output_dim))
            throw Error(errc::kLabelOutOfRange, "label " + std::to_string(labels[i]) + " at row " +
                                                    std::to_string(i) + " is outside [0, " +
                                                    std::to_string(output_dim) + ")");
}

Eigen::MatrixXd as_row(std::span<const double> features) {
    Eigen::MatrixXd x(1, static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) x(0, static_cast<Eigen::Index>(i)) = features[i];
    return x;
}

void check_input(const MlpModel& m, std::size_t n) {
    if (n != static_cast<std::size_t>(m.config.input_dim))
        throw Error(errc::kDimensionMismatch, "expected " + std::to_string(m.config.input_dim) +
                                                  " features, got " + std::to_string(n));
}

double batch_loss(const MlpModel& m, const Activations& act, std::span<const std::uint64_t> labels) {
    double total = 0.0;
    for (Eigen::Index r = 0; r < act.z.back().rows(); ++r)
        total += row_loss(m.config.output_activation, act.z.back().row(r), act.a.back().row(r),
                          labels[static_cast<std::size_t>(r)]);
    return total;
}

Eigen::Index argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < row.size(); ++k)
        if (row(k) > row(best)) best = k;
    return best;
}

}  // namespace

std::string_view to_string(OutputActivation a) {
    switch (a) {
        case OutputActivation::sine_shift: return "sine_shift";
        case OutputActivation::softmax: return "softmax";
        default: return "sigmoid";
    }
}

OutputActivation parse_output_activation(std::string_view name) {
    if (name == "sigmoid") return OutputActivation::sigmoid;
    if (name == "sine_shift") return OutputActivation::sine_shift;
    if (name == "softmax") return OutputActivation::softmax;
    throw Error(errc::kInvalidConfig,
                "unknown output activation '" + std::string(name) + "' (valid: sigmoid, sine_shift, softmax)");
}

void validate(const MlpConfig& c) {
    if (c.input_dim <= 0 || c.output_dim <= 0) throw Error(errc::kInvalidConfig, "layer dimensions must be positive");
    for (int h : c.hidden)
        if (h <= 0) throw Error(errc::kInvalidConfig, "hidden layer sizes must be positive");
    if (!(c.learning_rate > 0.0)) throw Error(errc::kInvalidConfig, "learning rate must be positive");
    if (c.epochs <= 0 || c.batch_size <= 0) throw Error(errc::kInvalidConfig, "epochs and batch size must be positive");
    if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0))
        throw Error(errc::kInvalidConfig, "validation fraction must lie in (0,1)");
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

MlpModel init(const MlpConfig& config) {
    validate(config);
    MlpModel m;
    m.config = config;
    SplitMix64 rng(config.seed);
    std::vector<int> dims{config.input_dim};
    dims.insert(dims.end(), config.hidden.begin(), config.hidden.end());
    dims.push_back(config.output_dim);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l];
        const int fan_out = dims[l + 1];
        const double s = std::sqrt(6.0 / (fan_in + fan_out));
        DenseLayer layer{Eigen::MatrixXd(fan_in, fan_out), Eigen::VectorXd::Zero(fan_out)};
        for (int i = 0; i < fan_in; ++i)
            for (int k = 0; k < fan_out; ++k) layer.weights(i, k) = (2.0 * rng.unit() - 1.0) * s;
        m.layers.push_back(std::move(layer));
    }
    return m;
}

Eigen::VectorXd forward(const MlpModel& m, std::span<const double> features) {
    check_input(m, features.size());
    return run_forward(m, as_row(features)).a.back().row(0).transpose();
}

Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::Ref<const FeatureRowMatrix>& inputs) {
    check_input(m, static_cast<std::size_t>(inputs.cols()));
    return run_forward(m, inputs).a.back();
}

double sample_loss(const MlpModel& m, std::span<const double> features, std::uint64_t label) {
    check_input(m, features.size());
    check_labels({&label, 1}, m.config.output_dim);
    const auto act = run_forward(m, as_row(features));
    return row_loss(m.config.output_activation, act.z.back().row(0), act.a.back().row(0), label);
}

std::vector<DenseLayer> gradients(const MlpModel& m, std::span<const double> features, std::uint64_t label) {
    check_input(m, features.size());
    check_labels({&label, 1}, m.config.output_dim);
    return backward(m, run_forward(m, as_row(features)), {&label, 1});
}

MlpModel train(MlpModel m, const FeatureRowMatrix& inputs, std::span<const std::uint64_t> labels) {
    validate(m.config);
    check_input(m, static_cast<std::size_t>(inputs.cols()));
    if (static_cast<std::size_t>(inputs.rows()) != labels.size())
        throw Error(errc::kDimensionMismatch, "feature rows and labels differ in length");
    check_labels(labels, m.config.output_dim);

    const auto n = labels.size();
    const std::size_t n_train = train_count_for(n, 1.0 - m.config.validation_fraction);
    const auto fit_rows = inputs.topRows(static_cast<Eigen::Index>(n_train));
    const auto val_rows = inputs.bottomRows(static_cast<Eigen::Index>(n - n_train));
    const auto fit_labels = labels.first(n_train);
    const auto val_labels = labels.subspan(n_train);

    const auto batch = static_cast<std::size_t>(m.config.batch_size);
    std::vector<Eigen::Index> order(n_train);
    std::vector<std::uint64_t> batch_labels;
    batch_labels.reserve(batch);

    for (int epoch = 1; epoch <= m.config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        SplitMix64 shuffle(SplitMix64::derive(m.config.seed ^ kShuffleStream, static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = n_train; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

        for (std::size_t start = 0; start < n_train; start += batch) {
            const std::size_t len = std::min(batch, n_train - start);
            const std::vector<Eigen::Index> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                order.begin() + static_cast<std::ptrdiff_t>(start + len));
            const Eigen::MatrixXd x = fit_rows(idx, Eigen::all);
            batch_labels.clear();
            for (auto i : idx) batch_labels.push_back(fit_labels[static_cast<std::size_t>(i)]);

            const auto grads = backward(m, run_forward(m, x), batch_labels);
            for (std::size_t l = 0; l < m.layers.size(); ++l) {
                m.layers[l].weights -= m.config.learning_rate * grads[l].weights;
                m.layers[l].bias -= m.config.learning_rate * grads[l].bias;
            }
        }

        const auto act = run_forward(m, fit_rows);
        const double loss = batch_loss(m, act, fit_labels) / static_cast<double>(n_train);
        m.history.push_back({epoch, loss, evaluate(m, val_rows, val_labels)});
    }
    return m;
}

MlpModel train(MlpModel m, const FeatureMatrix& features) {
    if (m.config.encoder.empty()) m.config.encoder = std::string(to_string(features.spec.kind));
    return train(std::move(m), scaled_for_network(features), features.labels);
}

double grad_check(const MlpModel& m, std::span<const double> features, std::uint64_t label) {
    const auto analytic = gradients(m, features, label);

    struct ParamRef {
        std::size_t layer;
        bool bias;
        Eigen::Index index;
    };
    std::vector<ParamRef> params;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        for (Eigen::Index i = 0; i < m.layers[l].weights.size(); ++i) params.push_back({l, false, i});
        for (Eigen::Index i = 0; i < m.layers[l].bias.size(); ++i) params.push_back({l, true, i});
    }
    constexpr std::size_t kSampled = 128;
    if (params.size() > kSampled) {
        SplitMix64 rng(SplitMix64::derive(m.config.seed ^ kGradCheckStream, label));
        for (std::size_t i = 0; i < kSampled; ++i)
            std::swap(params[i], params[i + rng.below(params.size() - i)]);
        params.resize(kSampled);
    }

    constexpr double h = 1e-5;
    MlpModel probe = m;
    double worst = 0.0;
    for (const auto& p : params) {
        double& slot = p.bias ? probe.layers[p.layer].bias(p.index) : probe.layers[p.layer].weights.data()[p.index];
        const double a = p.bias ? analytic[p.layer].bias(p.index) : analytic[p.layer].weights.data()[p.index];
        const double saved = slot;
        slot = saved + h;
        const double up = sample_loss(probe, features, label);
        slot = saved - h;
        const double down = sample_loss(probe, features, label);
        slot = saved;
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-6));
    }
    return worst;
}

double evaluate(const MlpModel& m, const FeatureRowMatrix& inputs, std::span<const std::uint64_t> labels) {
    check_input(m, static_cast<std::size_t>(inputs.cols()));
    if (static_cast<std::size_t>(inputs.rows()) != labels.size())
        throw Error(errc::kDimensionMismatch, "feature rows and labels differ in length");
    if (labels.empty()) throw Error(errc::kInvalidConfig, "cannot evaluate on an empty set");
    const Eigen::MatrixXd out = run_forward(m, inputs).a.back();
    std::size_t correct = 0;
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        if (static_cast<std::uint64_t>(argmax(out.row(r))) == labels[static_cast<std::size_t>(r)]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double evaluate(const MlpModel& m, const FeatureMatrix& features) {
    return evaluate(m, scaled_for_network(features), features.labels);
}

std::string serialize(const MlpModel& m) {
    const auto& c = m.config;
    KeyValues kv;
    kv.set("kind", "mlp");
    kv.set("input_dim", std::to_string(c.input_dim));
    std::string hidden;
    for (std::size_t i = 0; i < c.hidden.size(); ++i) {
        if (i) hidden += ',';
        hidden += std::to_string(c.hidden[i]);
    }
    kv.set("hidden", hidden);
    kv.set("output_dim", std::to_string(c.output_dim));
    kv.set("output_activation", std::string(to_string(c.output_activation)));
    kv.set("learning_rate", format_real(c.learning_rate));
    kv.set("epochs", std::to_string(c.epochs));
    kv.set("batch_size", std::to_string(c.batch_size));
    kv.set("seed", std::to_string(c.seed));
    kv.set("validation_fraction", format_real(c.validation_fraction));
    kv.set("encoder", c.encoder);
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& layer = m.layers[l];
        const std::string prefix = "layer" + std::to_string(l);
        kv.set(prefix + ".shape", std::to_string(layer.weights.rows()) + "x" + std::to_string(layer.weights.cols()));
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(layer.weights.size()));
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
            for (Eigen::Index k = 0; k < layer.weights.cols(); ++k) w.push_back(layer.weights(i, k));
        kv.set(prefix + ".weights", format_reals(w));
        kv.set(prefix + ".bias", format_reals(std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())));
    }
    return kv.str();
}

MlpModel parse_mlp_model(const std::string& text) {
    const auto kv = KeyValues::parse(text);
    if (kv.at("kind") != "mlp") throw Error(errc::kMalformed, "not an MLP model");
    MlpConfig c;
    c.input_dim = static_cast<int>(parse_uint(kv.at("input_dim")));
    c.hidden.clear();
    for (auto h : parse_uints(kv.at("hidden"))) c.hidden.push_back(static_cast<int>(h));
    c.output_dim = static_cast<int>(parse_uint(kv.at("output_dim")));
    c.output_activation = parse_output_activation(kv.at("output_activation"));
    c.learning_rate = parse_real(kv.at("learning_rate"));
    c.epochs = static_cast<int>(parse_uint(kv.at("epochs")));
    c.batch_size = static_cast<int>(parse_uint(kv.at("batch_size")));
    c.seed = parse_uint(kv.at("seed"));
    c.validation_fraction = parse_real(kv.at("validation_fraction"));
    c.encoder = kv.find("encoder").value_or("");
    validate(c);

    MlpModel m;
    m.config = c;
    std::vector<int> dims{c.input_dim};
    dims.insert(dims.end(), c.hidden.begin(), c.hidden.end());
    dims.push_back(c.output_dim);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::string prefix = "layer" + std::to_string(l);
        const auto expected_shape = std::to_string(dims[l]) + "x" + std::to_string(dims[l + 1]);
        if (kv.at(prefix + ".shape") != expected_shape)
            throw Error(errc::kMalformed, prefix + " shape disagrees with the config header");
        const auto w = parse_reals(kv.at(prefix + ".weights"));
        const auto b = parse_reals(kv.at(prefix + ".bias"));
        if (w.size() != static_cast<std::size_t>(dims[l]) * static_cast<std::size_t>(dims[l + 1]) ||
            b.size() != static_cast<std::size_t>(dims[l + 1]))
            throw Error(errc::kMalformed, prefix + " has the wrong number of values");
        DenseLayer layer{Eigen::MatrixXd(dims[l], dims[l + 1]), Eigen::VectorXd(dims[l + 1])};
        std::size_t at = 0;
        for (int i = 0; i < dims[l]; ++i)
            for (int k = 0; k < dims[l + 1]; ++k) layer.weights(i, k) = w[at++];
        for (int k = 0; k < dims[l + 1]; ++k) layer.bias(k) = b[static_cast<std::size_t>(k)];
        m.layers.push_back(std::move(layer));
    }
    return m;
}

std::string history_csv(const MlpModel& m) {
    std::string out = "epoch,loss,val_accuracy\n";
    for (const auto& h : m.history)
        out += std::to_string(h.epoch) + "," + format_real(h.loss) + "," + format_real(h.val_accuracy) + "\n";
    return out;
}

}  // namespace residue
