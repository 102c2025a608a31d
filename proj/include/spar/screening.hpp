#pragma once

#include <vector>

#include "spar/types.hpp"

namespace spar {

enum class ScoreSource { MarginalCorrelation, Holp, RidgeFixed, RidgeCv };

/// Nonnegative per-column importance weights.
struct ScreeningScores {
    Vector scores;
    ScoreSource source = ScoreSource::Holp;
    double lambda = 0.0; ///< ridge penalty for the Ridge* sources
};

/// |sample correlation(X_j, y)|, 0 for constant columns.
ScreeningScores marginal_correlation_scores(const Dataset& data);

/// |HOLP coefficient| after centering X and y. Scales linearly with y.
ScreeningScores holp_scores(const Dataset& data, double jitter = 0.0);

/// |ridge_dual coefficient| after centering X and y.
ScreeningScores ridge_scores(const Dataset& data, double lambda);

/// Ridge scores with lambda picked from a log grid by k-fold CV prediction
/// error. Fold assignment comes from `rng`.
ScreeningScores ridge_cv_scores(const Dataset& data, Rng& rng, int folds = 10, int grid_size = 30);

/// Indices of the k largest scores, ties broken by ascending index.
/// Returned in ascending index order.
IndexSet top_k(const ScreeningScores& scores, Index k);

struct ScreenDraw {
    IndexSet indices;        ///< ascending
    bool downgraded = false; ///< fewer positive scores than requested
};

/// Weighted sampling without replacement under the successive (sequential
/// renormalization) law: each pick is proportional to score among the items
/// not yet picked. Zero-score items are never drawn; when fewer than `size`
/// scores are positive all positive ones are returned and `downgraded` is set.
ScreenDraw probabilistic_screen(const ScreeningScores& scores, Index size, Rng& rng);

/// Screening quality of a selected set against the true coefficients.
struct ScreeningReport {
    Index k = 0;
    double precision = 0.0;
    double recall = 0.0;
    double sign_ratio = 0.0;
    double coef_correlation = 0.0;
};

ScreeningReport screening_report(const IndexSet& selected, const Vector& estimate, const Vector& truth);

} // namespace spar
