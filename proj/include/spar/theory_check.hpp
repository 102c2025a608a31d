#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spar/types.hpp"

namespace spar {

struct Theorem1Options {
    Index n = 50;
    Index p = 500;
    Index m = 20;
    Index a = 25;
    int reps = 200;
    std::uint64_t seed = 1;
    double rho = 0.5;  ///< compound-symmetry correlation
    double rho_snr = 10.0;
    Index n_test = 100;
    bool extra_rows = true; ///< also run the Gaussian, sparse and HOLP-informed projections
};

struct ProjectionRow {
    std::string method;
    double mean_mspe = 0.0;
    double se = 0.0;
};

struct Theorem1Report {
    std::vector<ProjectionRow> rows; ///< random-sign and oracle first
    double mean_difference = 0.0;    ///< random-sign minus oracle, paired
    double difference_se = 0.0;
    double bound = 0.0;
    double tau = 0.0;
    double lambda_min = 0.0;
    bool vacuous = false; ///< bound <= 0
    bool passed = false;
};

/// Compound-symmetry data with Example-1 coefficients drawn once; each
/// replication draws fresh train/test sets and fits centered least squares
/// after a CW projection with random signs and with d = beta.
/// Throws InvalidArgument unless m < n - 1 and a <= p.
Theorem1Report check_theorem1(const Theorem1Options& options);

struct MomentRow {
    Index p = 0;
    Index m = 0;
    Index a = 0;         ///< 0 for the inverse moments
    bool j_active = false;
    std::string quantity; ///< inverse1, inverse2, ratio1, ratio2
    double closed_form = 0.0;
    double exact = 0.0;
    bool exact_identity = false;
};

struct DecayRow {
    Index p = 0;
    double inverse2_error = 0.0;
    double ratio2_error = 0.0;
};

struct LemmaReport {
    std::vector<MomentRow> rows;
    double max_exact_error = 0.0; ///< over the exact identities
    Index decay_m = 5;
    Index decay_a = 10;
    std::vector<DecayRow> decay;  ///< p = 100, 200, 400, 800
    double inverse2_slope = 0.0;  ///< log-log slope of |error| against p
    double ratio2_slope = 0.0;
};

/// Closed forms against exact values for 2 <= p <= p_max, 1 <= m <= min(p, m_max),
/// 1 <= a < p. Exact values come from the binomial law of the preimage size.
/// Throws InvalidArgument when p_max > 14 or p_max < 2.
LemmaReport check_lemma_moments(Index p_max, Index m_max);

/// Exact E[g(|h^{-1}(h_j)|)] for the preimage size 1 + Bin(p-1, 1/m).
double exact_preimage_expectation(Index p, Index m, const std::function<double(double)>& g);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace spar
