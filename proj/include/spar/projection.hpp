#pragma once

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "spar/types.hpp"

namespace spar {

/// Sparse row-structured projection Phi = B D: column j of the input lands
/// in goal dimension goal[j] with weight d[j]. Goal dimensions are numbered
/// contiguously 0..m-1 and every one of them is hit by at least one column.
struct CwProjection {
    Index m = 0;
    std::vector<Index> goal; ///< length p_cols, values in [0, m)
    Vector d;                ///< length p_cols

    Index p_cols() const { return static_cast<Index>(goal.size()); }

    /// Columns mapped to each goal dimension, ascending within a bucket.
    std::vector<std::vector<Index>> buckets() const;
};

enum class DenseKind { Gaussian, Sparse };

struct DenseProjection {
    Matrix matrix; ///< m x p
    DenseKind kind = DenseKind::Gaussian;
    double psi = 1.0;
};

struct RandomSign {};
struct DiagonalValues {
    Vector values;
};
using DiagonalPolicy = std::variant<RandomSign, DiagonalValues>;

/// Dense m x p matrix of iid N(0, 1) entries.
DenseProjection gaussian_projection(Index m, Index p, Rng& rng);

/// iid entries +-1/sqrt(psi) with probability psi/2 each, 0 otherwise.
DenseProjection sparse_projection(Index m, Index p, double psi, Rng& rng);

/// Draws goal[j] iid uniform on [0, m_target), discards empty goal
/// dimensions, then sets the diagonal from `diagonal`.
CwProjection cw_projection(Index m_target, Index p, const DiagonalPolicy& diagonal, Rng& rng);

/// Same as cw_projection but with an injected map. `rng` is only consumed
/// for random signs (RandomSign policy or the full-rank adaption).
///
/// Under DiagonalValues, any goal dimension whose columns all carry a zero
/// value gets d = (random sign) * min{|v_k| : v_k != 0} on its smallest
/// column, so every dimension keeps a nonzero entry.
CwProjection cw_projection_from_map(std::vector<Index> goal, const DiagonalPolicy& diagonal, Rng& rng);

/// Z = X Phi' (n x m).
Matrix apply_projection(const CwProjection& proj, const Matrix& X);
Matrix apply_projection(const DenseProjection& proj, const Matrix& X);

/// Z = X_{., columns} Phi' where proj acts on the listed columns of X.
Matrix apply_projection(const CwProjection& proj, const Matrix& X, std::span<const Index> columns);

/// Phi' gamma as a p_cols-vector: entry j is d_j * gamma_{goal[j]}.
Vector lift_coefficients(const CwProjection& proj, const Vector& gamma);

/// Orthogonal projection of beta onto the row space of Phi via the
/// per-bucket closed form d_j * sum(d_k beta_k) / sum(d_k^2).
Vector project_coefficient(const CwProjection& proj, const Vector& beta);

/// Lower bound on the expected squared-prediction-error gain of the
/// coefficient-proportional CW projection over the random-sign one,
/// with the O(p^-2) remainder dropped. May be negative.
double theorem1_bound(const Vector& beta, double lambda_min, Index m, Index p, Index a, double tau);

/// E[1/|h^{-1}(h_j)|] (exact) and E[1/|h^{-1}(h_j)|^2] (to cubic order).
std::pair<double, double> inverse_preimage_moments(Index p, Index m);

/// E[|A n h^{-1}(h_j) \ {j}| / |h^{-1}(h_j)|^q] for q = 1 (exact) and
/// q = 2 (O(p^-3) term inside the bracket dropped).
std::pair<double, double> active_ratio_moments(Index p, Index m, Index a, bool j_active);

} // namespace spar
