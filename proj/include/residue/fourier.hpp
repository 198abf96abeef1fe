#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "residue/dataset.hpp"
#include "residue/ols.hpp"

namespace residue {

enum class BasisTerms { sine_cosine, sine_only, cosine_only };

/// Trigonometric regressors sin(2*pi*j*x/p), cos(2*pi*j*x/p) for j in
/// `frequencies`.
struct FourierBasisSpec {
    Modulus p{2};
    /// Number of harmonics J (== frequencies.size()).
    int pair_count = 1;
    std::vector<std::uint64_t> frequencies;
    BasisTerms terms = BasisTerms::sine_cosine;

    /// 2J for sine_cosine, J otherwise.
    int feature_dim() const;
    bool has_sine() const { return terms != BasisTerms::cosine_only; }
    bool has_cosine() const { return terms != BasisTerms::sine_only; }
};

/// j = 1..floor((p-1)/2) for odd p; one more (the Nyquist pair j = p/2) for
/// even p.
FourierBasisSpec basis_spec(Modulus p);
/// All harmonics j = 1..p-1. Redundant by construction (aliasing), used to
/// exercise the multicollinearity warning.
FourierBasisSpec extended_basis_spec(Modulus p);
FourierBasisSpec with_terms(FourierBasisSpec spec, BasisTerms terms);

/// sin(2*pi*r/p) and cos(2*pi*r/p) for r in [0, p), reduced to the first
/// quadrant so quarter-period points are exact.
struct SinCos {
    double sin;
    double cos;
};
SinCos unit_circle_point(std::uint64_t r, std::uint64_t p);

/// Features in the order [sin(j1), cos(j1), sin(j2), cos(j2), ...] (only the
/// selected terms). Phases are reduced as (j*x) mod p in integer arithmetic
/// before any floating-point evaluation.
std::vector<double> basis_features(std::uint64_t x, const FourierBasisSpec& spec);

inline constexpr double kDefaultRoundTolerance = 1e-5;

struct FitSummary {
    double r_squared = 0.0;
    double residual_norm = 0.0;
    double condition_estimate = 1.0;
    bool rank_warning = false;
};

struct FourierModel {
    FourierBasisSpec basis;
    double intercept = 0.0;
    std::vector<double> sine_coeffs;    // one per frequency (0 when unused)
    std::vector<double> cosine_coeffs;  // one per frequency (0 when unused)
    /// Present for regression fits, absent for the closed-form interpolant.
    std::optional<FitSummary> diagnostics;
    double round_tolerance = kDefaultRoundTolerance;

    std::uint64_t modulus() const { return basis.p.value(); }
    /// gamma + sum_j alpha_j sin(2 pi j x / p) + beta_j cos(2 pi j x / p).
    double evaluate(std::uint64_t x) const;
    /// The same formula at a real x (no phase reduction); used for plots.
    double evaluate_real(double x) const;
};

struct ClassifiedPrediction {
    double raw_value = 0.0;
    std::uint64_t label = 0;
    /// |raw - nearest integer| <= tolerance and that integer lies in [0, p-1].
    bool confident = false;
};

/// Builds the design with intercept over basis_features and solves by OLS.
/// Throws Error(underdetermined-labels) naming the first absent residue class;
/// Error(invalid-config) if the dataset is empty or its modulus differs from
/// the basis.
FourierModel fit_fourier(const LabeledDataset& train, double round_tolerance = kDefaultRoundTolerance);
FourierModel fit_fourier(const LabeledDataset& train, const FourierBasisSpec& basis,
                         double round_tolerance = kDefaultRoundTolerance);

/// label = round(raw) mod p; the tolerance only decides `confident`.
ClassifiedPrediction classify(double raw_value, std::uint64_t p, double tolerance);
ClassifiedPrediction predict_residue(const FourierModel& m, std::uint64_t x);

/// Exact trigonometric interpolant of the period 0, 1, ..., p-1 obtained from
/// the finite discrete Fourier sums over one period (no sampling, no OLS).
FourierModel closed_form_coefficients(Modulus p);

/// Piecewise-linear interpolation of x mod p: identity on [0, p-1], the
/// falling segment (1-p)x + (p-1)p on (p-1, p), extended with period p.
double sawtooth_interp(double x, Modulus p);

/// Fraction of samples whose predicted label equals the stored label.
/// Throws Error(modulus-mismatch) or Error(invalid-config) for an empty set.
double evaluate_accuracy(const FourierModel& m, const LabeledDataset& test);

/// key=value text: kind, p, J, frequencies, terms, gamma, alpha, beta,
/// tolerance and the diagnostics. Reals carry 17 significant digits.
std::string serialize(const FourierModel& m);
FourierModel parse_fourier_model(const std::string& text);

}  // namespace residue
