#include "spar/methods.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "spar/dataset_io.hpp"
#include "spar/error.hpp"
#include "spar/kernels.hpp"
#include "spar/numeric.hpp"
#include "spar/projection.hpp"
#include "spar/screening.hpp"

namespace spar {

namespace {

constexpr std::pair<DiagonalSource, std::string_view> kDiagonalNames[] = {
    {DiagonalSource::RandomSign, "random-sign"}, {DiagonalSource::HolpSign, "holp-sign"},
    {DiagonalSource::Holp, "holp"},              {DiagonalSource::OracleSign, "oracle-sign"},
    {DiagonalSource::Oracle, "oracle"},
};

std::string_view diagonal_name(DiagonalSource d)
{
    for (const auto& [k, name] : kDiagonalNames)
        if (k == d) return name;
    return "unknown";
}

std::optional<DiagonalSource> parse_diagonal(std::string_view name)
{
    for (const auto& [k, n] : kDiagonalNames)
        if (n == name) return k;
    return std::nullopt;
}

std::vector<std::string_view> split_colon(std::string_view s)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = s.find(':', start);
        parts.push_back(s.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    return parts;
}

std::optional<double> parse_number(std::string_view s)
{
    try {
        std::size_t used = 0;
        const std::string str(s);
        const double v = std::stod(str, &used);
        if (used != str.size() || !std::isfinite(v)) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::optional<int> parse_count(std::string_view s)
{
    const auto v = parse_number(s);
    if (!v || *v < 1 || std::floor(*v) != *v) return std::nullopt;
    return static_cast<int>(*v);
}

} // namespace

std::string MethodSpec::name() const
{
    const auto factor_suffix = [&] { return factor > 0.0 ? ":" + format_double(factor) : std::string(); };
    const auto m_suffix = [&] { return m > 0 ? ":" + std::to_string(m) : std::string(); };
    switch (kind) {
    case MethodKind::Holp: return "holp";
    case MethodKind::HolpScreenOnly: return "holp-screen" + factor_suffix();
    case MethodKind::SisScreenOnly: return "sis-screen" + factor_suffix();
    case MethodKind::Spar: return rule == SelectionRule::Best ? "spar-best" : "spar-1se";
    case MethodKind::CwProjection: return "cw:" + std::string(diagonal_name(diagonal)) + m_suffix();
    case MethodKind::GaussianProjection: return "gaussian" + m_suffix();
    case MethodKind::SparseProjection: return "sparse" + m_suffix();
    case MethodKind::ScreenEnsemble: return "scr-holp:" + std::to_string(models);
    case MethodKind::ProjectionEnsemble:
        return (diagonal == DiagonalSource::Holp ? "rp-cw-holp:" : "rp-cw:") + std::to_string(models);
    case MethodKind::ScreenProjectEnsemble: return "scr-rp:" + std::to_string(models);
    }
    return "unknown";
}

std::optional<MethodSpec> parse_method(std::string_view label)
{
    const auto parts = split_colon(label);
    const std::string_view head = parts[0];
    MethodSpec spec;
    auto optional_factor = [&]() -> bool {
        if (parts.size() == 1) return true;
        if (parts.size() != 2) return false;
        const auto v = parse_number(parts[1]);
        if (!v || *v <= 0.0) return false;
        spec.factor = *v;
        return true;
    };
    auto optional_m = [&](std::size_t at) -> bool {
        if (parts.size() == at) return true;
        if (parts.size() != at + 1) return false;
        const auto v = parse_count(parts[at]);
        if (!v) return false;
        spec.m = *v;
        return true;
    };
    auto optional_models = [&]() -> bool {
        if (parts.size() == 1) return true;
        if (parts.size() != 2) return false;
        const auto v = parse_count(parts[1]);
        if (!v) return false;
        spec.models = *v;
        return true;
    };

    if (head == "holp" && parts.size() == 1) return spec;
    if (head == "holp-screen") {
        spec.kind = MethodKind::HolpScreenOnly;
        return optional_factor() ? std::optional(spec) : std::nullopt;
    }
    if (head == "sis-screen") {
        spec.kind = MethodKind::SisScreenOnly;
        return optional_factor() ? std::optional(spec) : std::nullopt;
    }
    if ((head == "spar-best" || head == "spar-1se") && parts.size() == 1) {
        spec.kind = MethodKind::Spar;
        spec.rule = head == "spar-best" ? SelectionRule::Best : SelectionRule::OneSe;
        return spec;
    }
    if (head == "cw" && parts.size() >= 2) {
        spec.kind = MethodKind::CwProjection;
        const auto diag = parse_diagonal(parts[1]);
        if (!diag) return std::nullopt;
        spec.diagonal = *diag;
        return optional_m(2) ? std::optional(spec) : std::nullopt;
    }
    if (head == "gaussian" || head == "sparse") {
        spec.kind = head == "gaussian" ? MethodKind::GaussianProjection : MethodKind::SparseProjection;
        return optional_m(1) ? std::optional(spec) : std::nullopt;
    }
    if (head == "scr-holp" || head == "rp-cw" || head == "rp-cw-holp" || head == "scr-rp") {
        spec.kind = head == "scr-holp" ? MethodKind::ScreenEnsemble
                    : head == "scr-rp" ? MethodKind::ScreenProjectEnsemble
                                       : MethodKind::ProjectionEnsemble;
        spec.diagonal = head == "rp-cw" ? DiagonalSource::RandomSign : DiagonalSource::Holp;
        return optional_models() ? std::optional(spec) : std::nullopt;
    }
    return std::nullopt;
}

namespace {

struct Standardized {
    Dataset data;
    Standardization st;
};

Standardized standardized(const Dataset& train)
{
    auto [data, st] = standardize(train);
    return {std::move(data), std::move(st)};
}

LinearFit from_standardized(const Standardization& st, const Vector& beta_std)
{
    LinearFit fit;
    fit.coefficients = st.coefficients_to_original(beta_std);
    fit.intercept = st.intercept_for(fit.coefficients);
    return fit;
}

Vector holp_with_fallback(const Matrix& X, const Vector& y, double fallback)
{
    return with_jitter_fallback([&](double jitter) { return holp(X, y, jitter); }, fallback);
}

Matrix gather_columns(const Matrix& X, const IndexSet& columns)
{
    Matrix out(X.rows(), static_cast<Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) out.col(static_cast<Index>(c)) = X.col(columns[c]);
    return out;
}

LinearFit fit_screen_only(const MethodSpec& method, const Dataset& train, const SparConfig& spar)
{
    const Standardized s = standardized(train);
    const Index n = s.data.n();
    const Index p = s.data.p();
    Index k = 0;
    ScreeningScores scores;
    if (method.kind == MethodKind::HolpScreenOnly) {
        scores.scores = holp_with_fallback(s.data.X, s.data.y, spar.ridge_fallback).cwiseAbs();
        k = static_cast<Index>(std::ceil((method.factor > 0.0 ? method.factor : 0.5) * static_cast<double>(n) - 1e-9));
    } else {
        scores = marginal_correlation_scores(s.data);
        k = method.factor > 0.0
                ? static_cast<Index>(std::ceil(method.factor * static_cast<double>(n) - 1e-9))
                : static_cast<Index>(std::lround(static_cast<double>(n) / std::log(static_cast<double>(n))));
    }
    k = std::clamp<Index>(k, 1, p);
    const IndexSet selected = top_k(scores, k);
    const Matrix Xs = gather_columns(s.data.X, selected);
    const Vector coef = k < n ? with_jitter_fallback([&](double j) { return ols_reduced(Xs, s.data.y, j); }, spar.ridge_fallback)
                              : holp_with_fallback(Xs, s.data.y, spar.ridge_fallback);
    Vector beta = Vector::Zero(p);
    for (std::size_t c = 0; c < selected.size(); ++c) beta(selected[c]) = coef(static_cast<Index>(c));
    return from_standardized(s.st, beta);
}

Index single_projection_dim(const MethodSpec& method, const Dataset& train)
{
    Index m = method.m;
    if (m == 0) m = train.truth ? static_cast<Index>(train.truth->active_set.size()) : train.n() / 2;
    return std::clamp<Index>(m, 1, std::min(train.p(), std::max<Index>(1, train.n() - 2)));
}

LinearFit fit_single_projection(const MethodSpec& method, const Dataset& train, const SparConfig& spar, Rng& rng)
{
    train.validate();
    auto [Xc, x_mean] = center_columns(train.X);
    const double y_mean = train.y.mean();
    const Vector yc = train.y.array() - y_mean;
    const Index p = train.p();
    const Index m = single_projection_dim(method, train);

    Vector beta;
    if (method.kind == MethodKind::CwProjection) {
        DiagonalPolicy policy = RandomSign{};
        if (method.diagonal != DiagonalSource::RandomSign) {
            Vector values;
            if (method.diagonal == DiagonalSource::Holp || method.diagonal == DiagonalSource::HolpSign) {
                values = holp_with_fallback(Xc, yc, spar.ridge_fallback);
            } else {
                if (!train.truth) throw Error(ErrorCode::InvalidArgument, "oracle projection needs the true coefficients");
                values = train.truth->beta;
            }
            if (method.diagonal == DiagonalSource::HolpSign || method.diagonal == DiagonalSource::OracleSign)
                values = values.array().sign();
            policy = DiagonalValues{std::move(values)};
        }
        const CwProjection proj = cw_projection(m, p, policy, rng);
        const Matrix Z = apply_projection(proj, Xc);
        const Vector gamma = with_jitter_fallback([&](double j) { return ols_reduced(Z, yc, j); }, spar.ridge_fallback);
        beta = lift_coefficients(proj, gamma);
    } else {
        const DenseProjection proj = method.kind == MethodKind::GaussianProjection
                                         ? gaussian_projection(m, p, rng)
                                         : sparse_projection(m, p, 1.0 / 3.0, rng);
        const Matrix Z = apply_projection(proj, Xc);
        const Vector gamma = with_jitter_fallback([&](double j) { return ols_reduced(Z, yc, j); }, spar.ridge_fallback);
        beta = proj.matrix.transpose() * gamma;
    }
    LinearFit fit;
    fit.intercept = y_mean - x_mean.dot(beta);
    fit.coefficients = std::move(beta);
    return fit;
}

CwProjection identity_projection(Index width)
{
    CwProjection proj;
    proj.m = width;
    proj.goal.resize(static_cast<std::size_t>(width));
    for (Index j = 0; j < width; ++j) proj.goal[static_cast<std::size_t>(j)] = j;
    proj.d = Vector::Ones(width);
    return proj;
}

LinearFit fit_ensemble(const MethodSpec& method, const Dataset& train, const SparConfig& spar, Rng& rng)
{
    const Standardized s = standardized(train);
    const Index n = s.data.n();
    const Index p = s.data.p();
    const Vector weights = holp_with_fallback(s.data.X, s.data.y, spar.ridge_fallback);
    ScreeningScores scores{weights.cwiseAbs(), ScoreSource::Holp, 0.0};

    SparConfig config = spar;
    config.max_models = method.models;
    std::vector<kernels::ModelStructure> members;
    for (int k = 0; k < method.models; ++k) {
        kernels::ModelStructure member;
        switch (method.kind) {
        case MethodKind::ScreenEnsemble: {
            const double c = method.factor > 0.0 ? method.factor : 0.5;
            const Index size = std::clamp<Index>(static_cast<Index>(std::ceil(c * static_cast<double>(n) - 1e-9)), 1,
                                                 std::min(p, std::max<Index>(1, n - 1)));
            member.indices = method.models == 1 ? top_k(scores, size) : probabilistic_screen(scores, size, rng).indices;
            member.projection = identity_projection(static_cast<Index>(member.indices.size()));
            break;
        }
        case MethodKind::ProjectionEnsemble: {
            member.indices.resize(static_cast<std::size_t>(p));
            for (Index j = 0; j < p; ++j) member.indices[static_cast<std::size_t>(j)] = j;
            const Index lower = std::max<Index>(1, static_cast<Index>(std::ceil(std::log(static_cast<double>(p)))));
            const Index upper = std::max(lower, std::min(n / 2, p));
            const Index m = std::uniform_int_distribution<Index>(lower, upper)(rng);
            const DiagonalPolicy policy =
                method.diagonal == DiagonalSource::RandomSign ? DiagonalPolicy(RandomSign{}) : DiagonalPolicy(DiagonalValues{weights});
            member.projection = cw_projection(std::min(m, p), p, policy, rng);
            break;
        }
        default: member = draw_member(weights, n, config, rng); break;
        }
        members.push_back(std::move(member));
    }
    const auto fits = spar.parallel ? kernels::fit_members_omp(s.data.X, s.data.y, members, spar.ridge_fallback)
                                    : kernels::fit_members_serial(s.data.X, s.data.y, members, spar.ridge_fallback);
    Vector beta = Vector::Zero(p);
    for (std::size_t k = 0; k < members.size(); ++k) {
        const Vector lifted = lift_coefficients(members[k].projection, fits[k].gamma);
        for (std::size_t c = 0; c < members[k].indices.size(); ++c) beta(members[k].indices[c]) += lifted(static_cast<Index>(c));
    }
    beta /= static_cast<double>(method.models);
    LinearFit fit = from_standardized(s.st, beta);
    fit.chosen_m = method.models;
    fit.chosen_lambda = 0.0;
    return fit;
}

} // namespace

LinearFit fit_method(const MethodSpec& method, const Dataset& train, const SparConfig& spar, Rng& rng)
{
    switch (method.kind) {
    case MethodKind::Holp: {
        const Standardized s = standardized(train);
        return from_standardized(s.st, holp_with_fallback(s.data.X, s.data.y, spar.ridge_fallback));
    }
    case MethodKind::HolpScreenOnly:
    case MethodKind::SisScreenOnly: return fit_screen_only(method, train, spar);
    case MethodKind::Spar: {
        SparConfig config = spar;
        config.rule = method.rule;
        config.seed = rng();
        const SparModel model = cross_validate(train, config);
        LinearFit fit;
        fit.coefficients = model.coefficients_orig;
        fit.intercept = model.intercept;
        fit.chosen_m = model.chosen_models;
        fit.chosen_lambda = model.chosen_lambda;
        return fit;
    }
    case MethodKind::CwProjection:
    case MethodKind::GaussianProjection:
    case MethodKind::SparseProjection: return fit_single_projection(method, train, spar, rng);
    case MethodKind::ScreenEnsemble:
    case MethodKind::ProjectionEnsemble:
    case MethodKind::ScreenProjectEnsemble: return fit_ensemble(method, train, spar, rng);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method kind");
}

MethodOutcome evaluate_method(const MethodSpec& method, const Dataset& train, const Dataset& test,
                              const SparConfig& spar, Rng& rng, bool record_timing)
{
    if (train.p() != test.p()) throw Error(ErrorCode::DimensionMismatch, "train and test predictor counts differ");
    const auto start = std::chrono::steady_clock::now();
    const LinearFit fit = fit_method(method, train, spar, rng);
    const Vector y_hat = (test.X * fit.coefficients).array() + fit.intercept;
    const auto stop = std::chrono::steady_clock::now();

    MethodOutcome out;
    out.eval.rmspe = rmspe(y_hat, test.y, train.y.mean());
    out.eval.mspe = mspe(y_hat, test.y);
    out.eval.runtime_seconds = record_timing ? std::chrono::duration<double>(stop - start).count()
                                             : std::numeric_limits<double>::quiet_NaN();
    const Truth* truth = train.truth ? &*train.truth : (test.truth ? &*test.truth : nullptr);
    if (truth && !truth->active_set.empty()) {
        const SelectionScores sel = selection_scores(fit.coefficients, truth->beta);
        out.eval.precision = sel.precision;
        out.eval.recall = sel.recall;
        out.eval.f1 = sel.f1;
        out.has_selection = true;
    }
    out.eval.num_active = static_cast<Index>((fit.coefficients.array() != 0.0).count());
    out.chosen_m = fit.chosen_m;
    out.chosen_lambda = fit.chosen_lambda;
    return out;
}

} // namespace spar
