#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; both write each output slot from exactly one iteration
// with the same floating-point operation order, so their results are
// bit-identical for any thread count.

#include <span>
#include <vector>

#include "spar/projection.hpp"
#include "spar/types.hpp"

namespace spar::kernels {

/// Z = X_{., columns} Phi'. An empty `columns` means all columns of X.
Matrix cw_apply_serial(const CwProjection& proj, const Matrix& X, std::span<const Index> columns);
Matrix cw_apply_omp(const CwProjection& proj, const Matrix& X, std::span<const Index> columns);

/// One ensemble member's random structure.
struct ModelStructure {
    IndexSet indices;       ///< screened columns I_k
    CwProjection projection; ///< acts on indices
};

/// Reduced least squares for every member: gamma_k = OLS(X_{., I_k} Phi_k', y),
/// retrying with `fallback_jitter` on a singular Gram. Z_k is returned too.
struct MemberFit {
    Matrix Z;
    Vector gamma;
};
std::vector<MemberFit> fit_members_serial(const Matrix& X, const Vector& y,
                                          std::span<const ModelStructure> members, double fallback_jitter);
std::vector<MemberFit> fit_members_omp(const Matrix& X, const Vector& y,
                                       std::span<const ModelStructure> members, double fallback_jitter);

/// Input for the per-fold CV evaluation.
struct CvProblem {
    const Matrix* X = nullptr;                   ///< standardized predictors
    const Vector* y = nullptr;                   ///< standardized response
    std::span<const ModelStructure> members;
    std::span<const MemberFit> full_fits;        ///< Z_k on all rows
    std::span<const int> fold_of;                ///< fold id per row
    std::span<const double> thresholds;          ///< lambda grid
    int folds = 10;
    double fallback_jitter = 0.01;
};

/// mse[f][M-1][l]: withheld-fold MSE of the average of the first M members
/// (thresholded at thresholds[l]) refit on the in-fold rows.
using FoldMse = std::vector<std::vector<std::vector<double>>>;
FoldMse cv_fold_mse_serial(const CvProblem& problem);
FoldMse cv_fold_mse_omp(const CvProblem& problem);

} // namespace spar::kernels
