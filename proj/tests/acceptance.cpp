// Acceptance suite: one PASS/FAIL line per criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spar/error.hpp"
#include "spar/experiment.hpp"
#include "spar/numeric.hpp"
#include "spar/projection.hpp"
#include "spar/rng.hpp"
#include "spar/screening.hpp"
#include "spar/simgen.hpp"
#include "spar/theory_check.hpp"

using namespace spar;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

Matrix gaussian(Index rows, Index cols, Rng& rng)
{
    std::normal_distribution<double> normal;
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) M(i, j) = normal(rng);
    return M;
}

Index uniform(Index lo, Index hi, Rng& rng)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v)
{
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// Per-method mean of a field over the rows of a simulation.
std::map<std::string, std::vector<double>> collect(const std::vector<ResultRecord>& rows,
                                                   const std::function<double(const EvalResult&)>& field)
{
    std::map<std::string, std::vector<double>> out;
    for (const auto& r : rows) {
        if (!r.outcome) throw Error(ErrorCode::InvalidArgument, r.method + " failed: " + r.error);
        out[r.method].push_back(field(r.outcome->eval));
    }
    return out;
}

std::string csv_of(const std::vector<ResultRecord>& rows)
{
    std::ostringstream out;
    write_csv(out, rows);
    return out.str();
}

Verdict ridge_dual_vs_primal()
{
    Rng rng(101);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Index n = uniform(2, 30, rng), p = uniform(2, 30, rng);
        const Matrix X = gaussian(n, p, rng);
        const Vector y = gaussian(n, 1, rng);
        const double lambda = std::exp(std::uniform_real_distribution<double>(std::log(1e-3), std::log(1e3))(rng));
        const Matrix A = X.transpose() * X + lambda * Matrix::Identity(p, p);
        const Vector primal = A.ldlt().solve(X.transpose() * y);
        worst = std::max(worst, (ridge_dual(X, y, lambda) - primal).cwiseAbs().maxCoeff());
    }
    return {worst < 1e-8, fmt("max error %.2e", worst)};
}

Verdict holp_min_norm()
{
    Rng rng(202);
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_residual = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Index n = uniform(2, 20, rng), p = n + uniform(1, 30, rng);
        const Matrix X = gaussian(n, p, rng);
        const Vector y = gaussian(n, 1, rng);
        const Vector b = holp(X, y);
        worst_residual = std::max(worst_residual, (X * b - y).cwiseAbs().maxCoeff());
        // Null-space direction: z minus its projection onto the row space.
        const Vector z = gaussian(p, 1, rng);
        const Vector eta = z - X.transpose() * (X * X.transpose()).ldlt().solve(X * z);
        const double scale = std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
        const double gap = (b + scale * eta).norm() - b.norm();
        worst_gap = std::min(worst_gap, gap);
    }
    return {worst_gap > 0.0 && worst_residual < 1e-10,
            fmt("min norm gap %.2e, max residual %.2e", worst_gap, worst_residual)};
}

Matrix dense_phi(const CwProjection& proj)
{
    Matrix phi = Matrix::Zero(proj.m, proj.p_cols());
    for (Index j = 0; j < proj.p_cols(); ++j) phi(proj.goal[static_cast<std::size_t>(j)], j) = proj.d(j);
    return phi;
}

Verdict cw_projection_exactness()
{
    Rng rng(303);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Index p = uniform(2, 40, rng);
        const Index m = uniform(1, std::min<Index>(8, p), rng);
        Vector values = gaussian(p, 1, rng);
        for (Index j = 0; j < p; ++j)
            if (std::bernoulli_distribution(0.3)(rng)) values(j) = 0.0;
        if (values.isZero()) values(0) = 1.0;
        const bool signs = t % 2 == 0;
        const CwProjection proj = signs ? cw_projection(m, p, RandomSign{}, rng)
                                        : cw_projection(m, p, DiagonalValues{values}, rng);
        const Vector beta = gaussian(p, 1, rng);
        const Matrix phi = dense_phi(proj);
        const Vector oracle = phi.transpose() * (phi * phi.transpose()).ldlt().solve(phi * beta);
        worst = std::max(worst, (project_coefficient(proj, beta) - oracle).cwiseAbs().maxCoeff());
    }

    double worst_self = 0.0;
    int adapted = 0;
    for (int t = 0; t < 100; ++t) {
        const Index p = uniform(4, 40, rng);
        const Index m = uniform(2, std::min<Index>(8, p), rng);
        Vector beta = Vector::Zero(p);
        const Index a = uniform(1, std::max<Index>(1, p / 4), rng);
        for (Index j = 0; j < a; ++j) beta(uniform(0, p - 1, rng)) = std::normal_distribution<double>(0, 3)(rng);
        if (beta.isZero()) beta(0) = 1.0;
        const CwProjection proj = cw_projection(m, p, DiagonalValues{beta}, rng);
        if ((proj.d.array() != beta.array()).any()) ++adapted;
        worst_self = std::max(worst_self, (project_coefficient(proj, beta) - beta).cwiseAbs().maxCoeff());
    }
    return {worst < 1e-10 && worst_self < 1e-12 && adapted > 0,
            fmt("bucket vs dense %.2e, d = beta recovery %.2e (%g adapted maps)", worst, worst_self, adapted)};
}

Verdict moment_identities()
{
    const auto r = check_lemma_moments(12, 12);
    return {r.max_exact_error < 1e-12 && r.inverse2_slope <= -3.0 && r.ratio2_slope <= -3.0,
            fmt("exact error %.2e, slopes %.2f / %.2f", r.max_exact_error, r.inverse2_slope, r.ratio2_slope)};
}

Verdict theorem_desk_check()
{
    Theorem1Options o;
    o.extra_rows = false;
    const auto r = check_theorem1(o);
    const double random_sign = r.rows[0].mean_mspe, oracle = r.rows[1].mean_mspe;
    const bool ok = r.mean_difference >= r.bound - 2.0 * r.difference_se && oracle <= random_sign;
    return {ok, fmt("difference %.3f (se %.3f) vs bound %.3f", r.mean_difference, r.difference_se, r.bound) +
                    fmt("; oracle %.3f <= random-sign %.3f", oracle, random_sign)};
}

ExperimentConfig example_one(Index n, Index p, Index a, int reps)
{
    ExperimentConfig c = default_experiment();
    c.design.setting = CovarianceKind::CompoundSymmetry;
    c.design.regime = Regime::ExampleOne;
    c.design.n = n;
    c.design.p = p;
    c.design.active = a;
    c.reps = reps;
    c.seed = 2024;
    c.record_timing = false;
    return c;
}

Verdict ensemble_plateau()
{
    ExperimentConfig c = example_one(100, 1000, 50, 30);
    c.methods = {*parse_method("scr-rp:20"), *parse_method("scr-rp:50"), *parse_method("rp-cw-holp:20"),
                 *parse_method("rp-cw:20")};
    const auto m = collect(run_simulation(c), [](const EvalResult& e) { return e.mspe; });
    const double m20 = mean_of(m.at("scr-rp:20")), m50 = mean_of(m.at("scr-rp:50"));
    const double proj_only = std::min(mean_of(m.at("rp-cw-holp:20")), mean_of(m.at("rp-cw:20")));
    const double rel = std::abs(m20 - m50) / m50;
    return {rel <= 0.05 && m20 <= proj_only,
            fmt("M=20 %.3f, M=50 %.3f (rel %.3f); projection only %.3f", m20, m50, rel, proj_only)};
}

Verdict screening_quality()
{
    SimulationDesign d;
    d.setting = CovarianceKind::CompoundSymmetry;
    d.regime = Regime::ExampleOne;
    d.n = 100;
    d.p = 500;
    d.active = 50;
    d.n_test = 1;
    std::vector<double> recall_holp, recall_corr, sign_holp;
    for (int r = 0; r < 50; ++r) {
        const auto sim = generate(d, derive_seed(77, SeedStream::Data, static_cast<std::uint64_t>(r)));
        const Dataset& train = sim.train;
        const Vector& beta = train.truth->beta;
        const Index a = static_cast<Index>(train.truth->active_set.size());
        const auto [Xc, x_mean] = center_columns(train.X);
        const Vector yc = train.y.array() - train.y.mean();
        const Vector estimate = with_jitter_fallback([&](double j) { return holp(Xc, yc, j); }, 0.01);
        const auto holp_top = top_k(ScreeningScores{estimate.cwiseAbs(), ScoreSource::Holp, 0.0}, a);
        const auto corr_top = top_k(marginal_correlation_scores(train), a);
        const auto rh = screening_report(holp_top, estimate, beta);
        recall_holp.push_back(rh.recall);
        sign_holp.push_back(rh.sign_ratio);
        recall_corr.push_back(screening_report(corr_top, estimate, beta).recall);
    }
    const double rh = mean_of(recall_holp), rc = mean_of(recall_corr), sr = mean_of(sign_holp);
    return {rh > rc && sr > 0.9, fmt("recall HOLP %.3f vs correlation %.3f; HOLP sign ratio %.3f", rh, rc, sr)};
}

Verdict spar_behaviour()
{
    ExperimentConfig c = default_experiment();
    c.design.setting = CovarianceKind::GroupBlock;
    c.design.regime = Regime::Medium;
    c.design.n = 100;
    c.design.p = 1000;
    c.reps = 30;
    c.seed = 31;
    c.record_timing = false;
    c.methods = {*parse_method("holp"), *parse_method("spar-best"), *parse_method("spar-1se")};
    const auto rows = run_simulation(c);
    const auto rm = collect(rows, [](const EvalResult& e) { return e.rmspe; });
    const auto na = collect(rows, [](const EvalResult& e) { return static_cast<double>(e.num_active); });
    const double best = mean_of(rm.at("spar-best")), h = mean_of(rm.at("holp"));
    int sparser = 0;
    for (std::size_t r = 0; r < na.at("spar-best").size(); ++r)
        if (na.at("spar-1se")[r] < na.at("spar-best")[r]) ++sparser;
    const double share = sparser / static_cast<double>(c.reps);
    return {best < 1.0 && best <= 1.10 * h && share >= 0.9,
            fmt("SPAR-best rMSPE %.3f, HOLP %.3f; 1-se sparser in %.0f%% of reps", best, h, 100.0 * share)};
}

Verdict determinism()
{
    ExperimentConfig c = example_one(60, 300, 20, 8);
    c.methods = {*parse_method("holp"), *parse_method("spar-best"), *parse_method("spar-1se"),
                 *parse_method("scr-rp:10"), *parse_method("cw:random-sign")};
    c.spar.max_models = 8;
    const std::string serial = csv_of(run_simulation(c));
    const std::string again = csv_of(run_simulation(c));
    c.parallelism = 8;
    const std::string parallel = csv_of(run_simulation(c));

    ExperimentConfig s = c;
    s.reps = 3;
    s.parallelism = 1;
    const std::string sweep_serial = csv_of(sweep(SweepParameter::NumModels, {4, 8}, s));
    s.parallelism = 8;
    const std::string sweep_parallel = csv_of(sweep(SweepParameter::NumModels, {4, 8}, s));
    const bool ok = serial == again && serial == parallel && sweep_serial == sweep_parallel;
    return {ok, fmt("simulate %.0f bytes, sweep %.0f bytes; serial vs 8 workers ", static_cast<double>(serial.size()),
                    static_cast<double>(sweep_serial.size())) + (ok ? "identical" : "differ")};
}

Verdict snr_calibration()
{
    const CovarianceKind kinds[] = {CovarianceKind::Independent, CovarianceKind::CompoundSymmetry,
                                    CovarianceKind::Autoregressive, CovarianceKind::GroupBlock,
                                    CovarianceKind::Factor, CovarianceKind::ExtremeCorrelation};
    double worst = 0.0;
    for (auto kind : kinds) {
        SimulationDesign d;
        d.setting = kind;
        d.regime = Regime::Medium;
        d.n = 5000;
        d.p = 400;
        d.n_test = 1;
        const auto sim = generate(d, 9);
        const Vector signal = sim.train.X * sim.train.truth->beta;
        const double var = (signal.array() - signal.mean()).square().sum() / static_cast<double>(d.n - 1);
        worst = std::max(worst, std::abs(var / sim.train.truth->sigma2 / d.rho_snr - 1.0));
    }

    // Extreme-correlation ratio corr(x_j, y) / mean inactive corr against the
    // stated (j/a) 2^{-3/2} (a+1)^{-1/2}.
    const Index a = 5, p = 20;
    SimulationDesign d;
    d.setting = CovarianceKind::ExtremeCorrelation;
    d.n = 20000;
    d.p = p;
    d.active = a;
    d.n_test = 1;
    const int reps = 40;
    std::vector<std::vector<double>> ratios(static_cast<std::size_t>(a));
    for (int r = 0; r < reps; ++r) {
        const auto sim = generate(d, 500 + static_cast<std::uint64_t>(r));
        const auto [Xc, x_mean] = center_columns(sim.train.X);
        const Vector yc = sim.train.y.array() - sim.train.y.mean();
        auto corr = [&](Index j) { return Xc.col(j).dot(yc) / (Xc.col(j).norm() * yc.norm()); };
        double inactive = 0.0;
        for (Index j = a; j < p; ++j) inactive += corr(j);
        inactive /= static_cast<double>(p - a);
        for (Index j = 0; j < a; ++j) ratios[static_cast<std::size_t>(j)].push_back(corr(j) / inactive);
    }
    double worst_z = 0.0;
    for (Index j = 0; j < a; ++j) {
        const auto& v = ratios[static_cast<std::size_t>(j)];
        const double stated = (static_cast<double>(j + 1) / a) * std::pow(2.0, -1.5) / std::sqrt(a + 1.0);
        worst_z = std::max(worst_z, std::abs(mean_of(v) - stated) / se_of(v));
    }
    const double last = mean_of(ratios.back());
    const double root = std::sqrt(a + 1.0);
    return {worst < 0.10 && worst_z < 3.0,
            fmt("SNR max relative error %.3f; extreme ratio j=a mean %.4f vs stated %.4f, worst %.1f se", worst, last,
                std::pow(2.0, -1.5) / root, worst_z) +
                fmt(" (2^{+3/2} form gives %.4f)", std::pow(2.0, 1.5) / root)};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        Verdict (*run)();
    };
    const Criterion criteria[] = {
        {"ridge dual form equals primal", ridge_dual_vs_primal},
        {"HOLP is the minimum-norm interpolant", holp_min_norm},
        {"CW coefficient projection is exact", cw_projection_exactness},
        {"preimage moment identities and decay", moment_identities},
        {"oracle vs random-sign CW bound", theorem_desk_check},
        {"ensemble size plateau and screening gain", ensemble_plateau},
        {"HOLP screening beats marginal correlation", screening_quality},
        {"SPAR accuracy and 1-se sparsity", spar_behaviour},
        {"serial and parallel runs are byte-identical", determinism},
        {"SNR calibration and extreme-correlation ratio", snr_calibration},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %2d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", index, c.name, v.detail.c_str(), secs);
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    std::printf("%d of %d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
