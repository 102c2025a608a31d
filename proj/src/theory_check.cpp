#include "spar/theory_check.hpp"

#include <algorithm>
#include <cmath>

#include "spar/error.hpp"
#include "spar/methods.hpp"
#include "spar/projection.hpp"
#include "spar/rng.hpp"
#include "spar/simgen.hpp"

namespace spar {

namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    int count = 0;

    void add(double v)
    {
        sum += v;
        sum_sq += v * v;
        ++count;
    }
    double mean() const { return sum / count; }
    double se() const
    {
        if (count < 2) return 0.0;
        const double var = std::max(0.0, (sum_sq - sum * sum / count) / (count - 1));
        return std::sqrt(var / count);
    }
};

Dataset draw_dataset(const CovarianceSpec& cov, const Truth& truth, Index rows, Rng& rng)
{
    Dataset d;
    d.X = sample_predictors(cov, rows, rng);
    std::normal_distribution<double> noise(0.0, std::sqrt(truth.sigma2));
    d.y = (d.X * truth.beta).array() + truth.mu;
    for (Index i = 0; i < rows; ++i) d.y(i) += noise(rng);
    d.truth = truth;
    return d;
}

} // namespace

Theorem1Report check_theorem1(const Theorem1Options& o)
{
    if (!(o.m >= 1 && o.m < o.n - 1)) throw Error(ErrorCode::InvalidArgument, "need 1 <= m < n - 1");
    if (!(o.a >= 1 && o.a <= o.p)) throw Error(ErrorCode::InvalidArgument, "need 1 <= a <= p");
    if (o.reps < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 replications");
    if (!(o.rho >= 0.0 && o.rho < 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in [0, 1)");

    Rng setup = make_rng(derive_seed(o.seed, SeedStream::Theory, 0));
    const CovarianceSpec cov = make_covariance(CovarianceKind::CompoundSymmetry, o.p, o.a, setup, o.rho);
    Truth truth;
    truth.beta = sample_coefficients({CoefficientScheme::ExampleOne, o.a}, o.n, o.p, setup);
    truth.mu = 1.0;
    truth.sigma2 = quadratic_form(cov, truth.beta) / o.rho_snr;
    truth.active_set = support_of(truth.beta);

    const std::string m_text = std::to_string(o.m);
    std::vector<std::string> labels = {"cw:random-sign:" + m_text, "cw:oracle:" + m_text};
    if (o.extra_rows) {
        for (const char* head : {"gaussian:", "sparse:", "cw:holp:", "cw:holp-sign:", "cw:oracle-sign:"})
            labels.push_back(head + m_text);
        labels.push_back("holp");
    }
    std::vector<MethodSpec> methods;
    for (const auto& l : labels) methods.push_back(*parse_method(l));

    SparConfig spar;
    spar.parallel = false;
    std::vector<Accumulator> acc(methods.size());
    Accumulator diff;
    for (int r = 0; r < o.reps; ++r) {
        Rng data_rng = make_rng(derive_seed(o.seed, SeedStream::Data, static_cast<std::uint64_t>(r)));
        const Dataset train = draw_dataset(cov, truth, o.n, data_rng);
        const Dataset test = draw_dataset(cov, truth, o.n_test, data_rng);
        std::vector<double> mspes(methods.size());
        for (std::size_t i = 0; i < methods.size(); ++i) {
            Rng rng = make_rng(derive_seed(o.seed, SeedStream::Theory, static_cast<std::uint64_t>(r) + 1, i));
            mspes[i] = evaluate_method(methods[i], train, test, spar, rng, false).eval.mspe;
            acc[i].add(mspes[i]);
        }
        diff.add(mspes[0] - mspes[1]);
    }

    Theorem1Report report;
    for (std::size_t i = 0; i < methods.size(); ++i) report.rows.push_back({labels[i], acc[i].mean(), acc[i].se()});
    report.mean_difference = diff.mean();
    report.difference_se = diff.se();
    report.lambda_min = 1.0 - o.rho;
    double tau = INFINITY;
    for (Index j : truth.active_set) tau = std::min(tau, std::abs(truth.beta(j)));
    report.tau = tau;
    report.bound = theorem1_bound(truth.beta, report.lambda_min, o.m, o.p, static_cast<Index>(truth.active_set.size()), tau);
    report.vacuous = report.bound <= 0.0;
    report.passed = report.vacuous || report.mean_difference >= report.bound - 2.0 * report.difference_se;
    return report;
}

double exact_preimage_expectation(Index p, Index m, const std::function<double(double)>& g)
{
    const double q = 1.0 / static_cast<double>(m);
    const Index trials = p - 1;
    double total = 0.0;
    for (Index b = 0; b <= trials; ++b) {
        double log_pmf = std::lgamma(trials + 1.0) - std::lgamma(b + 1.0) - std::lgamma(trials - b + 1.0);
        if (m == 1) {
            if (b != trials) continue;
            log_pmf = 0.0;
        } else {
            log_pmf += b * std::log(q) + (trials - b) * std::log1p(-q);
        }
        total += std::exp(log_pmf) * g(1.0 + b);
    }
    return total;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::InvalidArgument, "need two or more points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace {

double inv1(double s) { return 1.0 / s; }
double inv2(double s) { return 1.0 / (s * s); }
double others1(double s) { return (s - 1.0) / s; }
double others2(double s) { return (s - 1.0) / (s * s); }

// E[|A n h^{-1}(h_j) \ {j}| / S^q]: given S, the other members are a uniform
// draw from the p-1 other columns, a_j of which are active.
double exact_ratio(Index p, Index m, Index a, bool j_active, int q)
{
    const double a_j = static_cast<double>(a - (j_active ? 1 : 0));
    return a_j / static_cast<double>(p - 1) * exact_preimage_expectation(p, m, q == 1 ? others1 : others2);
}

} // namespace

LemmaReport check_lemma_moments(Index p_max, Index m_max)
{
    if (p_max < 2 || p_max > 14) throw Error(ErrorCode::InvalidArgument, "p_max must lie in [2, 14]");
    if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "m_max must be positive");

    LemmaReport report;
    auto record = [&](MomentRow row) {
        if (row.exact_identity) report.max_exact_error = std::max(report.max_exact_error, std::abs(row.closed_form - row.exact));
        report.rows.push_back(std::move(row));
    };
    for (Index p = 2; p <= p_max; ++p) {
        for (Index m = 1; m <= std::min(p, m_max); ++m) {
            const auto [c1, c2] = inverse_preimage_moments(p, m);
            record({p, m, 0, false, "inverse1", c1, exact_preimage_expectation(p, m, inv1), true});
            record({p, m, 0, false, "inverse2", c2, exact_preimage_expectation(p, m, inv2), false});
            for (Index a = 1; a < p; ++a) {
                for (bool j_active : {false, true}) {
                    const auto [r1, r2] = active_ratio_moments(p, m, a, j_active);
                    record({p, m, a, j_active, "ratio1", r1, exact_ratio(p, m, a, j_active, 1), true});
                    record({p, m, a, j_active, "ratio2", r2, exact_ratio(p, m, a, j_active, 2), false});
                }
            }
        }
    }

    std::vector<double> ps, e_inv, e_ratio;
    for (Index p : {100, 200, 400, 800}) {
        const double inv_err = std::abs(inverse_preimage_moments(p, report.decay_m).second -
                                        exact_preimage_expectation(p, report.decay_m, inv2));
        const double ratio_err = std::abs(active_ratio_moments(p, report.decay_m, report.decay_a, false).second -
                                          exact_ratio(p, report.decay_m, report.decay_a, false, 2));
        report.decay.push_back({p, inv_err, ratio_err});
        ps.push_back(static_cast<double>(p));
        e_inv.push_back(inv_err);
        e_ratio.push_back(ratio_err);
    }
    report.inverse2_slope = loglog_slope(ps, e_inv);
    report.ratio2_slope = loglog_slope(ps, e_ratio);
    return report;
}

} // namespace spar
