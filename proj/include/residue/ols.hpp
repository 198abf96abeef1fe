#pragma once

#include <Eigen/Core>

namespace residue {

/// Regressors; when has_intercept is set a column of ones is appended at fit
/// and predict time (so the intercept is the last coefficient).
struct DesignMatrix {
    Eigen::MatrixXd values;
    bool has_intercept = true;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols() + (has_intercept ? 1 : 0); }
};

/// Relative pivot tolerance of the rank decision: a column is treated as
/// dependent when its pivot falls to 1e-10 of the largest column norm.
inline constexpr double kRankTolerance = 1e-10;

struct OlsFit {
    /// One entry per design column, intercept last when present.
    Eigen::VectorXd coefficients;
    bool has_intercept = true;
    double r_squared = 0.0;
    double residual_norm = 0.0;
    /// |R_00| / |R_kk| over the pivoted triangular factor; infinite when a
    /// pivot is exactly zero.
    double condition_estimate = 1.0;
    Eigen::Index rank = 0;
    /// Set iff condition_estimate >= 1 / kRankTolerance (numerical rank below
    /// the column count).
    bool rank_warning = false;

    double intercept() const { return has_intercept ? coefficients(coefficients.size() - 1) : 0.0; }
    /// Coefficients excluding the intercept.
    Eigen::VectorXd slopes() const {
        return coefficients.head(coefficients.size() - (has_intercept ? 1 : 0));
    }
};

/// Least squares via column-pivoted Householder QR completed to a complete
/// orthogonal decomposition, so rank-deficient designs get the minimum-norm
/// solution (plus rank_warning) instead of an error.
///
/// Throws Error(dimension-mismatch) when y has the wrong length or there are
/// fewer rows than columns, Error(domain) for non-finite inputs and
/// Error(degenerate-target) when y is constant (R^2 undefined).
OlsFit fit(const DesignMatrix& X, const Eigen::VectorXd& y);

Eigen::VectorXd predict(const OlsFit& fit, const DesignMatrix& X);

}  // namespace residue
