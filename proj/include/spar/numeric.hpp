#pragma once

#include <utility>

#include "spar/error.hpp"
#include "spar/types.hpp"

namespace spar {

/// Column-wise affine map between raw and standardized units.
struct Standardization {
    Vector x_center;
    Vector x_scale;     ///< sample sd (divisor n-1); 1 for constant columns
    double y_center = 0.0;
    double y_scale = 1.0;
    IndexSet constant_columns;

    /// Standardize new predictor rows with the stored parameters.
    Matrix transform_x(const Matrix& X) const;

    /// Inverse of the fitted transform. Constant columns come back as their center.
    Dataset restore(const Dataset& standardized) const;

    /// Standardized-unit coefficients to raw units; constant columns map to 0.
    Vector coefficients_to_original(const Vector& beta_std) const;

    /// Intercept that pairs with `coefficients_to_original(beta_std)`.
    double intercept_for(const Vector& beta_orig) const;
};

/// Centers and scales every column of X and y. Constant columns become
/// all-zero. Throws ZeroVarianceResponse when y is constant.
std::pair<Dataset, Standardization> standardize(const Dataset& data);

/// Column means and the centered copy of X (no scaling).
std::pair<Matrix, Vector> center_columns(const Matrix& X);

/// Solves (A + jitter I) x = B for symmetric positive (semi)definite A.
///
/// With jitter > 0 the regularized system is solved directly. With
/// jitter == 0 the exact system is tried first; if its Cholesky factor fails
/// or is numerically singular, a tiny ridge of 1e-10 * trace(A) / dim is
/// tried, and SingularGram is thrown if that also fails.
Matrix solve_spd(const Matrix& A, const Matrix& B, double jitter = 0.0);

/// Ridge coefficient in its n x n form, X' (lambda I_n + X X')^{-1} y.
Vector ridge_dual(const Matrix& X, const Vector& y, double lambda);

/// Minimum-norm interpolant X' (X X')^{-1} y, or X' (jitter I + X X')^{-1} y.
Vector holp(const Matrix& X, const Vector& y, double jitter = 0.0);

/// Least squares in a reduced space, (Z'Z + jitter I)^{-1} Z' y.
Vector ols_reduced(const Matrix& Z, const Vector& y, double jitter = 0.0);

/// Calls `fit(0.0)`; on SingularGram retries once with `fallback_jitter`.
template <class Fit>
auto with_jitter_fallback(Fit&& fit, double fallback_jitter)
{
    try {
        return fit(0.0);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularGram || !(fallback_jitter > 0.0)) throw;
        return fit(fallback_jitter);
    }
}

} // namespace spar
