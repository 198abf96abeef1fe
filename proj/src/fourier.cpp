#include "residue/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "residue/error.hpp"
#include "residue/keyvalue.hpp"

namespace residue {

int FourierBasisSpec::feature_dim() const {
    const int per = (has_sine() ? 1 : 0) + (has_cosine() ? 1 : 0);
    return per * pair_count;
}

FourierBasisSpec basis_spec(Modulus p) {
    const std::uint64_t v = p.value();
    const std::uint64_t pairs = (v - 1) / 2 + (v % 2 == 0 ? 1 : 0);
    FourierBasisSpec spec{p, static_cast<int>(pairs), {}, BasisTerms::sine_cosine};
    for (std::uint64_t j = 1; j <= pairs; ++j) spec.frequencies.push_back(j);
    return spec;
}

FourierBasisSpec extended_basis_spec(Modulus p) {
    FourierBasisSpec spec{p, static_cast<int>(p.value() - 1), {}, BasisTerms::sine_cosine};
    for (std::uint64_t j = 1; j < p.value(); ++j) spec.frequencies.push_back(j);
    return spec;
}

FourierBasisSpec with_terms(FourierBasisSpec spec, BasisTerms terms) {
    spec.terms = terms;
    return spec;
}

SinCos unit_circle_point(std::uint64_t r, std::uint64_t p) {
    // Angle 2*pi*r/p == (q + rem/p) * pi/2 with q the quadrant.
    const std::uint64_t n = 4 * (r % p);
    const std::uint64_t q = n / p;
    const std::uint64_t rem = n % p;
    const double phi = std::numbers::pi / 2 * (static_cast<double>(rem) / static_cast<double>(p));
    const double s = rem == 0 ? 0.0 : std::sin(phi);
    const double c = rem == 0 ? 1.0 : std::cos(phi);
    // + 0.0 normalizes negative zeros.
    switch (q) {
        case 0: return {s + 0.0, c + 0.0};
        case 1: return {c + 0.0, -s + 0.0};
        case 2: return {-s + 0.0, -c + 0.0};
        default: return {-c + 0.0, s + 0.0};
    }
}

namespace {

std::uint64_t phase(std::uint64_t j, std::uint64_t x, std::uint64_t p) {
    // Both factors are below p <= 2^32, so the product fits in 64 bits.
    return ((j % p) * (x % p)) % p;
}

void write_features(std::uint64_t x, const FourierBasisSpec& spec, double* out) {
    const std::uint64_t p = spec.p.value();
    for (std::uint64_t j : spec.frequencies) {
        const auto sc = unit_circle_point(phase(j, x, p), p);
        if (spec.has_sine()) *out++ = sc.sin;
        if (spec.has_cosine()) *out++ = sc.cos;
    }
}

void check_domain(std::uint64_t x) {
    if (x > kMaxInput) throw Error(errc::kDomain, std::to_string(x) + " exceeds 2^32");
}

}  // namespace

std::vector<double> basis_features(std::uint64_t x, const FourierBasisSpec& spec) {
    check_domain(x);
    std::vector<double> out(static_cast<std::size_t>(spec.feature_dim()));
    write_features(x, spec, out.data());
    return out;
}

double FourierModel::evaluate(std::uint64_t x) const {
    const std::uint64_t p = modulus();
    double value = intercept;
    for (std::size_t i = 0; i < basis.frequencies.size(); ++i) {
        const auto sc = unit_circle_point(phase(basis.frequencies[i], x, p), p);
        value += sine_coeffs[i] * sc.sin + cosine_coeffs[i] * sc.cos;
    }
    return value;
}

double FourierModel::evaluate_real(double x) const {
    const double p = static_cast<double>(modulus());
    double value = intercept;
    for (std::size_t i = 0; i < basis.frequencies.size(); ++i) {
        const double arg = 2.0 * std::numbers::pi * static_cast<double>(basis.frequencies[i]) * x / p;
        value += sine_coeffs[i] * std::sin(arg) + cosine_coeffs[i] * std::cos(arg);
    }
    return value;
}

FourierModel fit_fourier(const LabeledDataset& train, double round_tolerance) {
    return fit_fourier(train, basis_spec(train.modulus), round_tolerance);
}

FourierModel fit_fourier(const LabeledDataset& train, const FourierBasisSpec& basis, double round_tolerance) {
    if (train.size() == 0) throw Error(errc::kInvalidConfig, "training set is empty");
    if (train.modulus != basis.p)
        throw Error(errc::kModulusMismatch, "dataset modulus " + std::to_string(train.modulus.value()) +
                                                " differs from basis modulus " + std::to_string(basis.p.value()));
    if (!(round_tolerance > 0.0)) throw Error(errc::kInvalidConfig, "round tolerance must be positive");

    const std::uint64_t p = basis.p.value();
    std::vector<std::uint64_t> seen;
    seen.reserve(train.size());
    for (const auto& s : train.samples) seen.push_back(s.y);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (std::uint64_t c = 0; c < p; ++c) {
        if (c >= seen.size() || seen[c] != c)
            throw Error(errc::kUnderdeterminedLabels,
                        "residue class " + std::to_string(c) + " is absent from the training set");
    }

    const auto n = static_cast<Eigen::Index>(train.size());
    DesignMatrix X{Eigen::MatrixXd(n, basis.feature_dim()), true};
    Eigen::VectorXd y(n);
    std::vector<double> row(static_cast<std::size_t>(basis.feature_dim()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = train.samples[static_cast<std::size_t>(i)];
        check_domain(s.x);
        write_features(s.x, basis, row.data());
        for (Eigen::Index c = 0; c < X.values.cols(); ++c) X.values(i, c) = row[static_cast<std::size_t>(c)];
        y(i) = static_cast<double>(s.y);
    }

    const OlsFit ols = fit(X, y);

    FourierModel m;
    m.basis = basis;
    m.round_tolerance = round_tolerance;
    m.intercept = ols.intercept();
    m.sine_coeffs.assign(basis.frequencies.size(), 0.0);
    m.cosine_coeffs.assign(basis.frequencies.size(), 0.0);
    Eigen::Index col = 0;
    for (std::size_t i = 0; i < basis.frequencies.size(); ++i) {
        if (basis.has_sine()) m.sine_coeffs[i] = ols.coefficients(col++);
        if (basis.has_cosine()) m.cosine_coeffs[i] = ols.coefficients(col++);
    }
    m.diagnostics = FitSummary{ols.r_squared, ols.residual_norm, ols.condition_estimate, ols.rank_warning};
    return m;
}

ClassifiedPrediction classify(double raw_value, std::uint64_t p, double tolerance) {
    ClassifiedPrediction out;
    out.raw_value = raw_value;
    if (!std::isfinite(raw_value)) return out;
    const double nearest = std::round(raw_value);
    const double pd = static_cast<double>(p);
    double wrapped = std::fmod(nearest, pd);
    if (wrapped < 0.0) wrapped += pd;
    out.label = static_cast<std::uint64_t>(wrapped);
    if (out.label >= p) out.label = 0;
    out.confident = std::abs(raw_value - nearest) <= tolerance && nearest >= 0.0 && nearest <= pd - 1.0;
    return out;
}

ClassifiedPrediction predict_residue(const FourierModel& m, std::uint64_t x) {
    check_domain(x);
    return classify(m.evaluate(x), m.modulus(), m.round_tolerance);
}

FourierModel closed_form_coefficients(Modulus p) {
    const std::uint64_t n = p.value();
    const double nd = static_cast<double>(n);
    FourierModel m;
    m.basis = basis_spec(p);
    m.sine_coeffs.assign(m.basis.frequencies.size(), 0.0);
    m.cosine_coeffs.assign(m.basis.frequencies.size(), 0.0);

    // Mean of 0..p-1.
    m.intercept = (nd - 1.0) / 2.0;

    for (std::size_t i = 0; i < m.basis.frequencies.size(); ++i) {
        const std::uint64_t j = m.basis.frequencies[i];
        double s = 0.0;
        double c = 0.0;
        for (std::uint64_t r = 1; r < n; ++r) {
            const auto sc = unit_circle_point(phase(j, r, n), n);
            s += static_cast<double>(r) * sc.sin;
            c += static_cast<double>(r) * sc.cos;
        }
        if (2 * j == n) {
            // Nyquist harmonic: cos(pi x) = (-1)^x has squared norm p, sin vanishes.
            m.cosine_coeffs[i] = c / nd;
        } else {
            m.sine_coeffs[i] = 2.0 * s / nd;
            m.cosine_coeffs[i] = 2.0 * c / nd;
        }
    }
    return m;
}

double sawtooth_interp(double x, Modulus p) {
    const double pd = static_cast<double>(p.value());
    if (!std::isfinite(x)) throw Error(errc::kDomain, "sawtooth argument must be finite");
    double t = std::fmod(x, pd);
    if (t < 0.0) t += pd;
    if (t <= pd - 1.0) return t;
    return (1.0 - pd) * t + (pd - 1.0) * pd;
}

double evaluate_accuracy(const FourierModel& m, const LabeledDataset& test) {
    if (test.modulus.value() != m.modulus())
        throw Error(errc::kModulusMismatch, "model modulus " + std::to_string(m.modulus()) +
                                                " differs from dataset modulus " +
                                                std::to_string(test.modulus.value()));
    if (test.size() == 0) throw Error(errc::kInvalidConfig, "test set is empty");
    std::size_t correct = 0;
    for (const auto& s : test.samples)
        if (predict_residue(m, s.x).label == s.y) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

namespace {

std::string_view to_string(BasisTerms t) {
    switch (t) {
        case BasisTerms::sine_only: return "sine_only";
        case BasisTerms::cosine_only: return "cosine_only";
        default: return "sine_cosine";
    }
}

BasisTerms parse_terms(std::string_view s) {
    if (s == "sine_cosine") return BasisTerms::sine_cosine;
    if (s == "sine_only") return BasisTerms::sine_only;
    if (s == "cosine_only") return BasisTerms::cosine_only;
    throw Error(errc::kMalformed, "unknown basis terms '" + std::string(s) + "'");
}

}  // namespace

std::string serialize(const FourierModel& m) {
    KeyValues kv;
    kv.set("kind", "fourier");
    kv.set("p", std::to_string(m.modulus()));
    kv.set("J", std::to_string(m.basis.pair_count));
    std::string freqs;
    for (std::size_t i = 0; i < m.basis.frequencies.size(); ++i) {
        if (i) freqs += ',';
        freqs += std::to_string(m.basis.frequencies[i]);
    }
    kv.set("frequencies", freqs);
    kv.set("terms", std::string(to_string(m.basis.terms)));
    kv.set("gamma", format_real(m.intercept));
    kv.set("alpha", format_reals(m.sine_coeffs));
    kv.set("beta", format_reals(m.cosine_coeffs));
    kv.set("tolerance", format_real(m.round_tolerance));
    if (m.diagnostics) {
        kv.set("source", "ols");
        kv.set("r_squared", format_real(m.diagnostics->r_squared));
        kv.set("residual_norm", format_real(m.diagnostics->residual_norm));
        kv.set("condition_estimate", format_real(m.diagnostics->condition_estimate));
        kv.set("rank_warning", m.diagnostics->rank_warning ? "1" : "0");
    } else {
        kv.set("source", "closed_form");
    }
    return kv.str();
}

FourierModel parse_fourier_model(const std::string& text) {
    const auto kv = KeyValues::parse(text);
    if (kv.at("kind") != "fourier") throw Error(errc::kMalformed, "not a Fourier model");
    FourierModel m;
    m.basis.p = Modulus(parse_uint(kv.at("p")));
    m.basis.frequencies = parse_uints(kv.at("frequencies"));
    m.basis.pair_count = static_cast<int>(parse_uint(kv.at("J")));
    m.basis.terms = parse_terms(kv.at("terms"));
    m.intercept = parse_real(kv.at("gamma"));
    m.sine_coeffs = parse_reals(kv.at("alpha"));
    m.cosine_coeffs = parse_reals(kv.at("beta"));
    m.round_tolerance = parse_real(kv.at("tolerance"));
    if (m.basis.frequencies.size() != static_cast<std::size_t>(m.basis.pair_count) ||
        m.sine_coeffs.size() != m.basis.frequencies.size() || m.cosine_coeffs.size() != m.basis.frequencies.size())
        throw Error(errc::kMalformed, "coefficient counts disagree with J");
    if (kv.at("source") == "ols") {
        m.diagnostics = FitSummary{parse_real(kv.at("r_squared")), parse_real(kv.at("residual_norm")),
                                   parse_real(kv.at("condition_estimate")), kv.at("rank_warning") == "1"};
    }
    return m;
}

}  // namespace residue
