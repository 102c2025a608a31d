#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spar/kernels.hpp"
#include "spar/numeric.hpp"
#include "spar/projection.hpp"
#include "spar/screening.hpp"
#include "spar/types.hpp"

namespace spar {

enum class SelectionRule { Best, OneSe };

struct SparConfig {
    int max_models = 20;
    double screen_factor = 2.0;       ///< screen ceil(c * n) variables per model
    std::optional<Index> m_lower;     ///< default max(1, ceil(log p))
    std::optional<Index> m_upper;     ///< default floor(n / 2), then clamped
    int threshold_grid_size = 20;
    int folds = 10;
    SelectionRule rule = SelectionRule::Best;
    std::uint64_t seed = 1;
    double ridge_fallback = 0.01;     ///< jitter used when a Gram matrix is singular
    bool parallel = true;             ///< use the OpenMP kernels

    void validate() const;
};

/// One screened + projected least-squares model.
struct MarginalModel {
    IndexSet indices;
    CwProjection projection;
    Vector gamma;
    Vector beta; ///< length p, zero off `indices`
};

struct CvEntry {
    int models = 0;
    double lambda = 0.0;
    double mse = 0.0;
    double mse_se = 0.0;
    Index num_active = 0;
};

struct Choice {
    int models = 0;
    double lambda = 0.0;
    std::size_t table_row = 0;
};

struct SparModel {
    std::vector<MarginalModel> models;
    Standardization standardization;
    Vector holp_weights; ///< signed HOLP coefficient on standardized data
    SelectionRule rule = SelectionRule::Best;
    int chosen_models = 0;
    double chosen_lambda = 0.0;
    Vector coefficients_std;
    Vector coefficients_orig;
    double intercept = 0.0;
    std::vector<double> thresholds;
    std::vector<CvEntry> cv_table; ///< rows ordered by (models, lambda index)
    Choice best;
    Choice one_se;

    Index p() const { return coefficients_orig.size(); }
};

/// Screening size and the clamped goal-dimension range for a fit on n rows.
struct ModelSizes {
    Index screen_size = 0;
    Index m_lower = 0;
    Index m_upper = 0;
};
ModelSizes model_sizes(Index n, Index p, Index positive_weights, const SparConfig& config);

/// Draws I_k, m_k and Phi_k for one member. `weights` are signed HOLP
/// coefficients on standardized data. With max_models == 1 the screen is the
/// deterministic top-k.
kernels::ModelStructure draw_member(const Vector& weights, Index n, const SparConfig& config, Rng& rng);

/// Draws the member and fits its reduced least squares.
MarginalModel fit_marginal(const Dataset& data_std, const Vector& weights, const SparConfig& config, Rng& rng);

/// Entries with |beta_j| < lambda set to 0; |beta_j| == lambda survives.
Vector threshold(const Vector& beta, double lambda);

/// {0} plus quantiles i/(G-1), i = 1..G-1, of the pooled nonzero |beta|.
std::vector<double> threshold_grid(const std::vector<MarginalModel>& models, int grid_size);

/// Full SPAR fit: ensemble on all standardized data, k-fold CV over
/// (M, lambda), selection by config.rule, back-transform.
SparModel cross_validate(const Dataset& data, const SparConfig& config);

/// Average of the first `models` members, each thresholded at `lambda`
/// (standardized units).
Vector ensemble_coefficients(const SparModel& model, int models, double lambda);

/// Copy of `model` finalized under a different selection rule.
SparModel with_rule(const SparModel& model, SelectionRule rule);

/// intercept + X_new coefficients_orig.
Vector predict(const SparModel& model, const Matrix& X_new);

} // namespace spar
