#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "spar/error.hpp"
#include "spar/metrics.hpp"
#include "spar/model_io.hpp"
#include "spar/simgen.hpp"
#include "spar/spar.hpp"
#include "test_support.hpp"

using namespace spar;
using spar::test::max_abs_diff;

namespace {

SimulatedData example_data(Index n, Index p, std::uint64_t seed, Index a = 0)
{
    SimulationDesign design;
    design.setting = CovarianceKind::CompoundSymmetry;
    design.regime = Regime::ExampleOne;
    design.n = n;
    design.p = p;
    if (a > 0) design.active = a;
    return generate(design, seed);
}

SparConfig small_config(int models = 8)
{
    SparConfig c;
    c.max_models = models;
    c.threshold_grid_size = 10;
    c.seed = 42;
    return c;
}

// Type-7 sample quantile.
double quantile7(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const double lo = std::floor(h);
    const double hi = std::min(lo + 1.0, static_cast<double>(v.size()) - 1.0);
    return v[static_cast<std::size_t>(lo)] + (h - lo) * (v[static_cast<std::size_t>(hi)] - v[static_cast<std::size_t>(lo)]);
}

} // namespace

TEST_CASE("model sizes")
{
    SparConfig c;
    const auto s = model_sizes(100, 1000, 1000, c);
    CHECK(s.screen_size == 200);
    CHECK(s.m_lower == 7);
    CHECK(s.m_upper == 50);

    const auto wide = model_sizes(100, 150, 150, c);
    CHECK(wide.screen_size == 149);

    const auto few = model_sizes(100, 1000, 30, c);
    CHECK(few.screen_size == 30);
    CHECK(few.m_upper == 30);

    c.folds = 2;
    const auto tight = model_sizes(20, 1000, 1000, c);
    CHECK(tight.m_upper == std::min<Index>(10, 20 - 10 - 1));
    CHECK(tight.m_lower <= tight.m_upper);
}

TEST_CASE("threshold semantics")
{
    Vector b(3);
    b << 0.1, -0.5, 0.3;
    CHECK(threshold(b, 0.0) == b);
    const Vector t = threshold(b, 0.3);
    CHECK(t(0) == 0.0);
    CHECK(t(1) == -0.5);
    CHECK(t(2) == 0.3);
    CHECK(threshold(b, 0.6).isZero(0.0));
}

TEST_CASE("threshold grid is zero plus type-7 quantiles of pooled magnitudes")
{
    Rng rng(3);
    std::vector<MarginalModel> models(3);
    std::vector<double> pooled;
    for (auto& m : models) {
        m.beta = Vector::Zero(30);
        for (Index j = 0; j < 30; j += 3) {
            m.beta(j) = test::random_vector(1, rng)(0);
            pooled.push_back(std::abs(m.beta(j)));
        }
    }
    const auto grid = threshold_grid(models, 6);
    REQUIRE(grid.size() == 6);
    CHECK(grid[0] == 0.0);
    for (int i = 1; i < 6; ++i) CHECK(grid[static_cast<std::size_t>(i)] == doctest::Approx(quantile7(pooled, i / 5.0)).epsilon(1e-14));
    CHECK(std::is_sorted(grid.begin(), grid.end()));
    CHECK(grid.back() == *std::max_element(pooled.begin(), pooled.end()));
}

TEST_CASE("fit_marginal: structure, expansion and determinism")
{
    const auto sim = example_data(60, 300, 1);
    const auto [data, st] = standardize(sim.train);
    const Vector w = holp(data.X, data.y, 0.01);
    SparConfig c = small_config();

    Rng a(9), b(9);
    const auto m1 = fit_marginal(data, w, c, a);
    const auto m2 = fit_marginal(data, w, c, b);
    CHECK(m1.indices == m2.indices);
    CHECK(m1.projection.goal == m2.projection.goal);
    CHECK(m1.gamma == m2.gamma);

    const auto sizes = model_sizes(60, 300, 300, c);
    CHECK(static_cast<Index>(m1.indices.size()) == sizes.screen_size);
    CHECK(m1.projection.m <= sizes.m_upper);
    CHECK(m1.projection.m < 60);
    std::set<Index> in(m1.indices.begin(), m1.indices.end());
    const Vector lifted = lift_coefficients(m1.projection, m1.gamma);
    for (Index j = 0; j < 300; ++j)
        if (!in.count(j)) CHECK(m1.beta(j) == 0.0);
    for (std::size_t c2 = 0; c2 < m1.indices.size(); ++c2) CHECK(m1.beta(m1.indices[c2]) == lifted(static_cast<Index>(c2)));
    // d carries the HOLP weights of the screened columns.
    for (std::size_t c2 = 0; c2 < m1.indices.size(); ++c2) CHECK(m1.projection.d(static_cast<Index>(c2)) == w(m1.indices[c2]));

    SparConfig single = c;
    single.max_models = 1;
    Rng r(1);
    const auto top = fit_marginal(data, w, single, r);
    CHECK(top.indices == top_k(ScreeningScores{w.cwiseAbs(), ScoreSource::Holp, 0.0}, sizes.screen_size));
}

TEST_CASE("cross_validate: table invariants")
{
    const auto sim = example_data(80, 400, 2);
    const SparConfig c = small_config();
    const SparModel model = cross_validate(sim.train, c);

    REQUIRE(model.cv_table.size() == static_cast<std::size_t>(c.max_models) * model.thresholds.size());
    CHECK(model.thresholds.front() == 0.0);
    std::set<Index> uni;
    for (int M = 1; M <= c.max_models; ++M) {
        const auto& mk = model.models[static_cast<std::size_t>(M - 1)];
        uni.insert(mk.indices.begin(), mk.indices.end());
        const std::size_t base = static_cast<std::size_t>(M - 1) * model.thresholds.size();
        CHECK(model.cv_table[base].num_active == static_cast<Index>(uni.size()));
        for (std::size_t l = 1; l < model.thresholds.size(); ++l) {
            CHECK(model.cv_table[base + l].num_active <= model.cv_table[base + l - 1].num_active);
            const Vector hi = ensemble_coefficients(model, M, model.thresholds[l]);
            const Vector lo = ensemble_coefficients(model, M, model.thresholds[l - 1]);
            for (Index j = 0; j < hi.size(); ++j)
                if (hi(j) != 0.0) CHECK(lo(j) != 0.0);
        }
    }
    CHECK(model.one_se.table_row < model.cv_table.size());
    CHECK(model.cv_table[model.one_se.table_row].num_active <= model.cv_table[model.best.table_row].num_active);
    const auto& best = model.cv_table[model.best.table_row];
    for (const auto& e : model.cv_table) CHECK(e.mse >= best.mse);
    CHECK(model.cv_table[model.one_se.table_row].mse <= best.mse + best.mse_se);
    CHECK(max_abs_diff(model.coefficients_std, ensemble_coefficients(model, model.chosen_models, model.chosen_lambda)) == 0.0);
}

TEST_CASE("cross_validate: deterministic and independent of the kernel path")
{
    const auto sim = example_data(60, 250, 3);
    SparConfig c = small_config(6);
    const SparModel a = cross_validate(sim.train, c);
    const SparModel b = cross_validate(sim.train, c);
    CHECK(model_to_json(a) == model_to_json(b));
    c.parallel = false;
    const SparModel serial = cross_validate(sim.train, c);
    CHECK(model_to_json(a) == model_to_json(serial));
    c.seed = 43;
    CHECK(model_to_json(cross_validate(sim.train, c)) != model_to_json(a));
}

TEST_CASE("cross_validate: one-se rule never picks a denser model")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto sim = example_data(60, 300, seed);
        SparConfig c = small_config(6);
        c.seed = seed;
        const SparModel best = cross_validate(sim.train, c);
        const SparModel one = with_rule(best, SelectionRule::OneSe);
        CHECK(one.cv_table[one.one_se.table_row].num_active <= best.cv_table[best.best.table_row].num_active);
        c.rule = SelectionRule::OneSe;
        CHECK(model_to_json(cross_validate(sim.train, c)) == model_to_json(one));
    }
}

TEST_CASE("cross_validate: errors")
{
    const auto sim = example_data(15, 100, 4);
    SparConfig c = small_config();
    try {
        cross_validate(sim.train, c);
        FAIL("expected FoldTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FoldTooSmall);
    }
    c.max_models = 0;
    CHECK_THROWS_AS(cross_validate(sim.train, c), Error);
}

TEST_CASE("predict: centering identity and the standardized path")
{
    const auto sim = example_data(60, 200, 5);
    const SparModel model = cross_validate(sim.train, small_config());
    const Matrix mean_row = sim.train.X.colwise().mean();
    CHECK(predict(model, mean_row)(0) == doctest::Approx(sim.train.y.mean()).epsilon(1e-10));

    const Matrix Xs = model.standardization.transform_x(sim.test.X);
    const Vector via_std = (Xs * model.coefficients_std).array() * model.standardization.y_scale + model.standardization.y_center;
    CHECK(max_abs_diff(predict(model, sim.test.X), via_std) < 1e-10);
    CHECK_THROWS_AS(predict(model, Matrix::Zero(2, 3)), Error);

    SparModel zero = model;
    zero.coefficients_orig.setZero();
    zero.intercept = 2.5;
    CHECK((predict(zero, sim.test.X).array() == 2.5).all());
}

TEST_CASE("averaged coefficients predict the average of member predictions")
{
    const auto sim = example_data(60, 200, 6);
    const SparModel model = cross_validate(sim.train, small_config());
    const Matrix Xs = model.standardization.transform_x(sim.test.X);
    const int M = static_cast<int>(model.models.size());
    Vector avg = Vector::Zero(Xs.rows());
    for (const auto& m : model.models) avg += Xs * m.beta;
    avg /= M;
    CHECK(max_abs_diff(Xs * ensemble_coefficients(model, M, 0.0), avg) < 1e-10);
}

TEST_CASE("model JSON round trip")
{
    const auto sim = example_data(60, 200, 7);
    const SparModel model = cross_validate(sim.train, small_config());
    const SparModel back = model_from_json(model_to_json(model));
    CHECK(back.chosen_models == model.chosen_models);
    CHECK(back.chosen_lambda == model.chosen_lambda);
    CHECK(back.intercept == model.intercept);
    CHECK(back.coefficients_orig == model.coefficients_orig);
    CHECK(back.cv_table.size() == model.cv_table.size());
    CHECK(predict(back, sim.test.X) == predict(model, sim.test.X));
    CHECK(model_to_json(back) == model_to_json(model));

    for (const char* bad : {"", "[]", "{\"format\":\"spar-model\",\"version\":99}", "{\"format\":\"other\"}"}) {
        try {
            model_from_json(bad);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }
}

TEST_CASE("scaled-down Example 1: the chosen model beats the naive predictor")
{
    const auto sim = example_data(100, 1000, 8, 50);
    SparConfig c;
    c.seed = 8;
    const SparModel model = cross_validate(sim.train, c);
    CHECK(rmspe(predict(model, sim.test.X), sim.test.y, sim.train.y.mean()) < 1.0);
}
