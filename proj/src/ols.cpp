#include "residue/ols.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>

#include "residue/error.hpp"

namespace residue {

namespace {

Eigen::MatrixXd with_intercept(const DesignMatrix& X) {
    if (!X.has_intercept) return X.values;
    Eigen::MatrixXd A(X.values.rows(), X.values.cols() + 1);
    A.leftCols(X.values.cols()) = X.values;
    A.col(X.values.cols()).setOnes();
    return A;
}

}  // namespace

OlsFit fit(const DesignMatrix& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n)
        throw Error(errc::kDimensionMismatch,
                    "design has " + std::to_string(n) + " rows but target has " + std::to_string(y.size()));
    if (k == 0 || n < k)
        throw Error(errc::kDimensionMismatch,
                    "need at least as many rows as columns (" + std::to_string(n) + " < " + std::to_string(k) + ")");
    if (!X.values.allFinite() || !y.allFinite()) throw Error(errc::kDomain, "non-finite entry in design or target");

    const double mean = y.mean();
    const double sst = (y.array() - mean).square().sum();
    if (!(sst > 0.0)) throw Error(errc::kDegenerateTarget, "target is constant; R^2 is undefined");

    const Eigen::MatrixXd A = with_intercept(X);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.rows(), A.cols());
    qr.setThreshold(kRankTolerance);
    qr.compute(A);

    const Eigen::VectorXd pivots = qr.matrixQR().diagonal().cwiseAbs();
    const double smallest = pivots.minCoeff();
    OlsFit out;
    out.has_intercept = X.has_intercept;
    out.rank = qr.rank();
    out.condition_estimate =
        smallest > 0.0 ? std::max(1.0, pivots(0) / smallest) : std::numeric_limits<double>::infinity();
    out.rank_warning = out.condition_estimate >= 1.0 / kRankTolerance || out.rank < k;

    if (out.rank == k) {
        out.coefficients = qr.solve(y);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A.rows(), A.cols());
        cod.setThreshold(kRankTolerance);
        cod.compute(A);
        out.coefficients = cod.solve(y);
    }

    const Eigen::VectorXd residual = y - A * out.coefficients;
    out.residual_norm = residual.norm();
    out.r_squared = 1.0 - residual.squaredNorm() / sst;
    return out;
}

Eigen::VectorXd predict(const OlsFit& fit, const DesignMatrix& X) {
    if (X.has_intercept != fit.has_intercept || X.cols() != fit.coefficients.size())
        throw Error(errc::kDimensionMismatch, "design has " + std::to_string(X.cols()) +
                                                  " columns but the fit has " +
                                                  std::to_string(fit.coefficients.size()));
    Eigen::VectorXd out = X.values * fit.slopes();
    if (fit.has_intercept) out.array() += fit.intercept();
    return out;
}

}  // namespace residue
