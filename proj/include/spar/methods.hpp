#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "spar/metrics.hpp"
#include "spar/simgen.hpp"
#include "spar/spar.hpp"

namespace spar {

enum class MethodKind {
    Holp,               ///< dense minimum-norm fit on all predictors
    HolpScreenOnly,     ///< top-k by |HOLP|, then least squares (or HOLP when k >= n)
    SisScreenOnly,      ///< top-k by |marginal correlation|, then the same fit
    Spar,               ///< cross-validated SPAR
    CwProjection,       ///< one CW projection + least squares
    GaussianProjection, ///< one Gaussian projection + least squares
    SparseProjection,   ///< one psi = 1/3 sparse projection + least squares
    ScreenEnsemble,     ///< averaged screened least squares (n/2 variables), no threshold
    ProjectionEnsemble, ///< averaged CW projections of all predictors, no threshold
    ScreenProjectEnsemble, ///< averaged screen + CW-HOLP members, no threshold
};

enum class DiagonalSource { RandomSign, HolpSign, Holp, OracleSign, Oracle };

struct MethodSpec {
    MethodKind kind = MethodKind::Holp;
    double factor = 0.0;          ///< screen factor c; 0 selects the method default
    SelectionRule rule = SelectionRule::Best;
    DiagonalSource diagonal = DiagonalSource::RandomSign;
    Index m = 0;                  ///< goal dimension of single projections; 0 = a (or n/2 without truth)
    int models = 20;              ///< ensemble size of the *Ensemble kinds

    /// Canonical label, accepted back by parse_method.
    std::string name() const;
};

/// Parses labels such as `holp`, `holp-screen:2`, `sis-screen`, `spar-best`,
/// `spar-1se`, `cw:oracle:20`, `gaussian:50`, `sparse`, `scr-rp:50`,
/// `rp-cw-holp:20`, `rp-cw:20`, `scr-holp:20`.
std::optional<MethodSpec> parse_method(std::string_view label);

struct MethodOutcome {
    EvalResult eval;
    bool has_selection = false; ///< false when no truth was available
    std::optional<int> chosen_m;
    std::optional<double> chosen_lambda;
};

/// Coefficients and intercept in original units.
struct LinearFit {
    Vector coefficients;
    double intercept = 0.0;
    std::optional<int> chosen_m;
    std::optional<double> chosen_lambda;
};

/// Fits `method` on `train`. `spar` supplies SPAR settings and the fallback
/// ridge; its seed is replaced by draws from `rng`.
LinearFit fit_method(const MethodSpec& method, const Dataset& train, const SparConfig& spar, Rng& rng);

/// fit_method followed by prediction on `test`; timing covers both.
MethodOutcome evaluate_method(const MethodSpec& method, const Dataset& train, const Dataset& test,
                              const SparConfig& spar, Rng& rng, bool record_timing = true);

} // namespace spar
