#include "spar/spar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spar/error.hpp"

namespace spar {

void SparConfig::validate() const
{
    if (max_models < 1) throw Error(ErrorCode::InvalidArgument, "max_models must be >= 1");
    if (folds < 2) throw Error(ErrorCode::InvalidArgument, "folds must be >= 2");
    if (!(screen_factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "screen_factor must be > 0");
    if (threshold_grid_size < 1) throw Error(ErrorCode::InvalidArgument, "threshold_grid_size must be >= 1");
    if (m_lower && *m_lower < 1) throw Error(ErrorCode::InvalidArgument, "m_lower must be >= 1");
    if (m_lower && m_upper && *m_upper < *m_lower) throw Error(ErrorCode::InvalidArgument, "m_upper must be >= m_lower");
    if (ridge_fallback < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge_fallback must be >= 0");
}

ModelSizes model_sizes(Index n, Index p, Index positive_weights, const SparConfig& config)
{
    ModelSizes s;
    auto size = static_cast<Index>(std::ceil(config.screen_factor * static_cast<double>(n) - 1e-9));
    if (size >= p) size = p - 1;
    if (positive_weights > 0) size = std::min(size, positive_weights);
    s.screen_size = std::max<Index>(1, size);

    Index lower = config.m_lower.value_or(
        std::max<Index>(1, static_cast<Index>(std::ceil(std::log(static_cast<double>(p))))));
    const Index fold_size = (n + config.folds - 1) / config.folds;
    Index upper = config.m_upper.value_or(n / 2);
    upper = std::min({upper, s.screen_size, n - fold_size - 1});
    lower = std::min(lower, s.screen_size);
    s.m_lower = std::max<Index>(1, lower);
    s.m_upper = std::max(s.m_lower, upper);
    return s;
}

kernels::ModelStructure draw_member(const Vector& weights, Index n, const SparConfig& config, Rng& rng)
{
    const Index p = weights.size();
    if (p < 2) throw Error(ErrorCode::InvalidArgument, "SPAR needs at least two predictors");
    ScreeningScores scores{weights.cwiseAbs(), ScoreSource::Holp, 0.0};
    const auto positive = static_cast<Index>((weights.array() != 0.0).count());
    if (positive == 0) throw Error(ErrorCode::AllZeroValues, "all HOLP weights are zero");
    const ModelSizes sizes = model_sizes(n, p, positive, config);

    kernels::ModelStructure member;
    if (config.max_models == 1)
        member.indices = top_k(scores, sizes.screen_size);
    else
        member.indices = probabilistic_screen(scores, sizes.screen_size, rng).indices;

    const auto width = static_cast<Index>(member.indices.size());
    std::uniform_int_distribution<Index> pick_m(sizes.m_lower, sizes.m_upper);
    const Index m_target = std::min(pick_m(rng), width);
    Vector values(width);
    for (Index c = 0; c < width; ++c) values(c) = weights(member.indices[static_cast<std::size_t>(c)]);
    member.projection = cw_projection(m_target, width, DiagonalValues{std::move(values)}, rng);
    return member;
}

namespace {

MarginalModel assemble(kernels::ModelStructure structure, Vector gamma, Index p)
{
    MarginalModel model;
    model.beta = Vector::Zero(p);
    const Vector lifted = lift_coefficients(structure.projection, gamma);
    for (std::size_t c = 0; c < structure.indices.size(); ++c) model.beta(structure.indices[c]) = lifted(static_cast<Index>(c));
    model.indices = std::move(structure.indices);
    model.projection = std::move(structure.projection);
    model.gamma = std::move(gamma);
    return model;
}

} // namespace

MarginalModel fit_marginal(const Dataset& data_std, const Vector& weights, const SparConfig& config, Rng& rng)
{
    data_std.validate();
    if (weights.size() != data_std.p()) throw Error(ErrorCode::DimensionMismatch, "weights length differs from p");
    kernels::ModelStructure member = draw_member(weights, data_std.n(), config, rng);
    if (member.projection.m >= data_std.n())
        throw Error(ErrorCode::DegenerateReducedFit, "goal dimension is not below the sample size");
    auto fits = kernels::fit_members_serial(data_std.X, data_std.y, std::span(&member, 1), config.ridge_fallback);
    return assemble(std::move(member), std::move(fits.front().gamma), data_std.p());
}

Vector threshold(const Vector& beta, double lambda)
{
    return (beta.array().abs() < lambda).select(0.0, beta);
}

std::vector<double> threshold_grid(const std::vector<MarginalModel>& models, int grid_size)
{
    std::vector<double> pooled;
    for (const auto& model : models)
        for (Index j = 0; j < model.beta.size(); ++j)
            if (model.beta(j) != 0.0) pooled.push_back(std::abs(model.beta(j)));
    std::vector<double> grid{0.0};
    if (pooled.empty() || grid_size < 2) return grid;
    std::sort(pooled.begin(), pooled.end());
    const double last = static_cast<double>(pooled.size() - 1);
    for (int i = 1; i < grid_size; ++i) {
        const double h = last * static_cast<double>(i) / static_cast<double>(grid_size - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, pooled.size() - 1);
        grid.push_back(pooled[lo] + (h - static_cast<double>(lo)) * (pooled[hi] - pooled[lo]));
    }
    return grid;
}

Vector ensemble_coefficients(const SparModel& model, int models, double lambda)
{
    if (models < 1 || models > static_cast<int>(model.models.size()))
        throw Error(ErrorCode::InvalidArgument, "ensemble size outside the fitted range");
    Vector sum = Vector::Zero(model.models.front().beta.size());
    for (int k = 0; k < models; ++k) sum += threshold(model.models[static_cast<std::size_t>(k)].beta, lambda);
    return sum / static_cast<double>(models);
}

namespace {

void finalize(SparModel& model, SelectionRule rule)
{
    const Choice& choice = rule == SelectionRule::Best ? model.best : model.one_se;
    model.rule = rule;
    model.chosen_models = choice.models;
    model.chosen_lambda = choice.lambda;
    model.coefficients_std = ensemble_coefficients(model, choice.models, choice.lambda);
    model.coefficients_orig = model.standardization.coefficients_to_original(model.coefficients_std);
    model.intercept = model.standardization.intercept_for(model.coefficients_orig);
}

void select_pairs(SparModel& model)
{
    const auto& table = model.cv_table;
    std::size_t best = 0;
    for (std::size_t r = 1; r < table.size(); ++r)
        if (table[r].mse < table[best].mse) best = r;
    const double limit = table[best].mse + table[best].mse_se;
    std::size_t one_se = best;
    for (std::size_t r = 0; r < table.size(); ++r) {
        if (!(table[r].mse <= limit)) continue;
        const auto& a = table[r];
        const auto& b = table[one_se];
        if (a.num_active < b.num_active || (a.num_active == b.num_active && a.mse < b.mse)) one_se = r;
    }
    model.best = {table[best].models, table[best].lambda, best};
    model.one_se = {table[one_se].models, table[one_se].lambda, one_se};
}

} // namespace

SparModel cross_validate(const Dataset& data, const SparConfig& config)
{
    config.validate();
    data.validate();
    const Index n = data.n();
    const Index p = data.p();
    if (n < 2 * static_cast<Index>(config.folds))
        throw Error(ErrorCode::FoldTooSmall, "cross-validation needs n >= 2 * folds");

    SparModel model;
    auto [std_data, st] = standardize(data);
    model.standardization = std::move(st);
    model.holp_weights = with_jitter_fallback(
        [&](double jitter) { return holp(std_data.X, std_data.y, jitter); }, config.ridge_fallback);

    // All random structure is drawn sequentially before any parallel work.
    Rng rng(config.seed);
    std::vector<kernels::ModelStructure> members;
    members.reserve(static_cast<std::size_t>(config.max_models));
    for (int k = 0; k < config.max_models; ++k) members.push_back(draw_member(model.holp_weights, n, config, rng));
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = static_cast<int>(i % config.folds);

    const auto fits = config.parallel
                          ? kernels::fit_members_omp(std_data.X, std_data.y, members, config.ridge_fallback)
                          : kernels::fit_members_serial(std_data.X, std_data.y, members, config.ridge_fallback);
    model.models.reserve(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) model.models.push_back(assemble(members[k], fits[k].gamma, p));
    model.thresholds = threshold_grid(model.models, config.threshold_grid_size);

    kernels::CvProblem problem;
    problem.X = &std_data.X;
    problem.y = &std_data.y;
    problem.members = members;
    problem.full_fits = fits;
    problem.fold_of = fold_of;
    problem.thresholds = model.thresholds;
    problem.folds = config.folds;
    problem.fallback_jitter = config.ridge_fallback;
    const kernels::FoldMse fold_mse =
        config.parallel ? kernels::cv_fold_mse_omp(problem) : kernels::cv_fold_mse_serial(problem);

    const std::size_t n_lambda = model.thresholds.size();
    std::vector<Vector> cumulative(n_lambda, Vector::Zero(p));
    const double folds = static_cast<double>(config.folds);
    for (std::size_t k = 0; k < members.size(); ++k) {
        for (std::size_t l = 0; l < n_lambda; ++l) {
            cumulative[l] += threshold(model.models[k].beta, model.thresholds[l]);
            double mean = 0.0;
            for (const auto& f : fold_mse) mean += f[k][l];
            mean /= folds;
            double ss = 0.0;
            for (const auto& f : fold_mse) ss += (f[k][l] - mean) * (f[k][l] - mean);
            CvEntry entry;
            entry.models = static_cast<int>(k + 1);
            entry.lambda = model.thresholds[l];
            entry.mse = mean;
            entry.mse_se = std::sqrt(ss / (folds - 1.0)) / std::sqrt(folds);
            entry.num_active = static_cast<Index>((cumulative[l].array() != 0.0).count());
            model.cv_table.push_back(entry);
        }
    }
    select_pairs(model);
    finalize(model, config.rule);
    return model;
}

SparModel with_rule(const SparModel& model, SelectionRule rule)
{
    SparModel out = model;
    finalize(out, rule);
    return out;
}

Vector predict(const SparModel& model, const Matrix& X_new)
{
    if (X_new.cols() != model.coefficients_orig.size())
        throw Error(ErrorCode::DimensionMismatch, "predict: column count differs from the fitted model");
    return (X_new * model.coefficients_orig).array() + model.intercept;
}

} // namespace spar
