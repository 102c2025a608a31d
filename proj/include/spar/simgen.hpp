#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "spar/types.hpp"

namespace spar {

enum class CovarianceKind { Independent, CompoundSymmetry, Autoregressive, GroupBlock, Factor, ExtremeCorrelation };

/// Structural description of a predictor covariance. Dense Sigma is never
/// formed; sampling and quadratic forms use the structure directly.
struct CovarianceSpec {
    CovarianceKind kind = CovarianceKind::Independent;
    Index p = 0;
    double rho = 0.0;        ///< CompoundSymmetry / Autoregressive
    Index block_size = 100;  ///< GroupBlock
    Index active = 0;        ///< ExtremeCorrelation: number of leading active columns
    Matrix loadings;         ///< Factor: p x k, Sigma = F F' + 0.01 I

    /// Number of GroupBlock blocks; the last (identity) block absorbs any remainder.
    Index block_count() const;
    /// True when p is not a multiple of block_size.
    bool partial_last_block() const;
    void validate() const;
};

/// The covariance used by the simulation settings: compound symmetry with
/// rho = 0.5, AR(1) with rho = 0.9, the 100-column group design, a factor
/// model with k = a standard normal loadings, or the latent extreme-correlation
/// construction over the first a columns. `rho` overrides the default of the
/// two single-parameter kinds.
CovarianceSpec make_covariance(CovarianceKind kind, Index p, Index a, Rng& rng,
                               std::optional<double> rho = std::nullopt);

/// n iid rows from N(0, Sigma) (or the latent construction for ExtremeCorrelation).
Matrix sample_predictors(const CovarianceSpec& spec, Index n, Rng& rng);

/// beta' Sigma beta from the structure.
double quadratic_form(const CovarianceSpec& spec, const Vector& beta);

enum class Regime { Sparse, Medium, Dense, ExampleOne };
enum class CoefficientScheme { FanLv, Ladder, ExampleOne };

struct CoefficientSpec {
    CoefficientScheme scheme = CoefficientScheme::FanLv;
    Index a = 1;
};

/// round(2 log p), round(n/2 + 2 log p) or round(p/4), clamped to [1, p].
/// ExampleOne has no derived count and uses round(p/20).
Index active_count(Regime regime, Index n, Index p);

/// FanLv: a uniform positions, values (-1)^u (4 log(n)/sqrt(n) + |z|) with
/// u ~ Bernoulli(0.4). Ladder: beta_j = j on the first a columns (1-based j).
/// ExampleOne: first a values uniform on {-3,-2,-1,1,2,3}.
Vector sample_coefficients(const CoefficientSpec& spec, Index n, Index p, Rng& rng);

struct SimulationDesign {
    CovarianceKind setting = CovarianceKind::Independent;
    Regime regime = Regime::Sparse;
    Index n = 100;
    Index p = 1000;
    Index n_test = 100;
    double rho_snr = 10.0;
    double mu = 1.0;
    std::optional<Index> active; ///< overrides the regime-derived a
    std::optional<double> rho;   ///< overrides the setting's default rho

    void validate() const;
};

struct SimulatedData {
    Dataset train;
    Dataset test;
    CovarianceSpec covariance;
    CoefficientSpec coefficients;
};

/// Draws beta once, calibrates sigma^2 = beta' Sigma beta / rho_snr, then
/// samples train and test sets with y = mu + x' beta + eps.
SimulatedData generate(const SimulationDesign& design, std::uint64_t seed);

std::string_view to_string(CovarianceKind kind);
std::string_view to_string(Regime regime);
std::optional<CovarianceKind> parse_covariance_kind(std::string_view name);
std::optional<Regime> parse_regime(std::string_view name);

} // namespace spar
