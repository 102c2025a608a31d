#include "spar/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spar/error.hpp"
#include "spar/kernels.hpp"

namespace spar {

std::vector<std::vector<Index>> CwProjection::buckets() const
{
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < goal.size(); ++j) out[static_cast<std::size_t>(goal[j])].push_back(static_cast<Index>(j));
    return out;
}

DenseProjection gaussian_projection(Index m, Index p, Rng& rng)
{
    if (m < 1 || m > p) throw Error(ErrorCode::InvalidArgument, "gaussian_projection: need 1 <= m <= p");
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseProjection out;
    out.kind = DenseKind::Gaussian;
    out.matrix.resize(m, p);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < p; ++j) out.matrix(i, j) = normal(rng);
    return out;
}

DenseProjection sparse_projection(Index m, Index p, double psi, Rng& rng)
{
    if (m < 1 || m > p) throw Error(ErrorCode::InvalidArgument, "sparse_projection: need 1 <= m <= p");
    if (!(psi > 0.0 && psi <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sparse_projection: psi must lie in (0, 1]");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double value = 1.0 / std::sqrt(psi);
    DenseProjection out;
    out.kind = DenseKind::Sparse;
    out.psi = psi;
    out.matrix.resize(m, p);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < p; ++j) {
            const double u = unif(rng);
            out.matrix(i, j) = u < psi / 2 ? value : (u < psi ? -value : 0.0);
        }
    return out;
}

namespace {

double random_sign(Rng& rng)
{
    return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
}

} // namespace

CwProjection cw_projection_from_map(std::vector<Index> goal, const DiagonalPolicy& diagonal, Rng& rng)
{
    const auto p = static_cast<Index>(goal.size());
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "cw_projection: empty map");
    Index max_goal = 0;
    for (Index g : goal) {
        if (g < 0) throw Error(ErrorCode::InvalidArgument, "cw_projection: negative goal dimension");
        max_goal = std::max(max_goal, g);
    }
    // Renumber the goal dimensions that are hit, keeping their order.
    std::vector<Index> renumber(static_cast<std::size_t>(max_goal + 1), -1);
    for (Index g : goal) renumber[static_cast<std::size_t>(g)] = 0;
    Index m = 0;
    for (auto& r : renumber)
        if (r == 0) r = m++;
    for (auto& g : goal) g = renumber[static_cast<std::size_t>(g)];

    CwProjection proj;
    proj.m = m;
    proj.goal = std::move(goal);
    proj.d.resize(p);

    if (std::holds_alternative<RandomSign>(diagonal)) {
        for (Index j = 0; j < p; ++j) proj.d(j) = random_sign(rng);
        return proj;
    }

    const Vector& v = std::get<DiagonalValues>(diagonal).values;
    if (v.size() != p) throw Error(ErrorCode::DimensionMismatch, "cw_projection: values length differs from p");
    double min_abs = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < p; ++j) {
        if (!std::isfinite(v(j))) throw Error(ErrorCode::InvalidArgument, "cw_projection: non-finite diagonal value");
        if (v(j) != 0.0) min_abs = std::min(min_abs, std::abs(v(j)));
    }
    if (!std::isfinite(min_abs)) throw Error(ErrorCode::AllZeroValues, "cw_projection: all diagonal values are zero");
    proj.d = v;

    // Full-rank adaption: a goal dimension with only zero values gets a
    // signed minimal magnitude on its smallest column.
    std::vector<Index> first_col(static_cast<std::size_t>(m), -1);
    std::vector<bool> has_nonzero(static_cast<std::size_t>(m), false);
    for (Index j = 0; j < p; ++j) {
        const auto g = static_cast<std::size_t>(proj.goal[static_cast<std::size_t>(j)]);
        if (first_col[g] < 0) first_col[g] = j;
        if (v(j) != 0.0) has_nonzero[g] = true;
    }
    for (std::size_t g = 0; g < static_cast<std::size_t>(m); ++g)
        if (!has_nonzero[g]) proj.d(first_col[g]) = random_sign(rng) * min_abs;
    return proj;
}

CwProjection cw_projection(Index m_target, Index p, const DiagonalPolicy& diagonal, Rng& rng)
{
    if (m_target < 1 || m_target > p) throw Error(ErrorCode::InvalidArgument, "cw_projection: need 1 <= m_target <= p");
    if (const auto* values = std::get_if<DiagonalValues>(&diagonal); values && values->values.size() != p)
        throw Error(ErrorCode::DimensionMismatch, "cw_projection: values length differs from p");
    std::uniform_int_distribution<Index> pick(0, m_target - 1);
    std::vector<Index> goal(static_cast<std::size_t>(p));
    for (auto& g : goal) g = pick(rng);
    return cw_projection_from_map(std::move(goal), diagonal, rng);
}

Matrix apply_projection(const CwProjection& proj, const Matrix& X)
{
    if (X.cols() != proj.p_cols()) throw Error(ErrorCode::DimensionMismatch, "apply_projection: column counts differ");
    return kernels::cw_apply_omp(proj, X, {});
}

Matrix apply_projection(const CwProjection& proj, const Matrix& X, std::span<const Index> columns)
{
    if (static_cast<Index>(columns.size()) != proj.p_cols())
        throw Error(ErrorCode::DimensionMismatch, "apply_projection: column list length differs from projection");
    for (Index c : columns)
        if (c < 0 || c >= X.cols()) throw Error(ErrorCode::DimensionMismatch, "apply_projection: column index out of range");
    return kernels::cw_apply_omp(proj, X, columns);
}

Matrix apply_projection(const DenseProjection& proj, const Matrix& X)
{
    if (X.cols() != proj.matrix.cols()) throw Error(ErrorCode::DimensionMismatch, "apply_projection: column counts differ");
    return X * proj.matrix.transpose();
}

Vector lift_coefficients(const CwProjection& proj, const Vector& gamma)
{
    if (gamma.size() != proj.m) throw Error(ErrorCode::DimensionMismatch, "lift_coefficients: gamma length differs from m");
    Vector out(proj.p_cols());
    for (Index j = 0; j < proj.p_cols(); ++j) out(j) = proj.d(j) * gamma(proj.goal[static_cast<std::size_t>(j)]);
    return out;
}

Vector project_coefficient(const CwProjection& proj, const Vector& beta)
{
    if (beta.size() != proj.p_cols()) throw Error(ErrorCode::DimensionMismatch, "project_coefficient: length differs from p");
    Vector num = Vector::Zero(proj.m);
    Vector den = Vector::Zero(proj.m);
    for (Index j = 0; j < proj.p_cols(); ++j) {
        const Index g = proj.goal[static_cast<std::size_t>(j)];
        num(g) += proj.d(j) * beta(j);
        den(g) += proj.d(j) * proj.d(j);
    }
    Vector out(proj.p_cols());
    for (Index j = 0; j < proj.p_cols(); ++j) {
        const Index g = proj.goal[static_cast<std::size_t>(j)];
        if (!(den(g) > 0.0)) throw Error(ErrorCode::InvalidArgument, "project_coefficient: goal dimension with zero diagonal");
        out(j) = proj.d(j) * num(g) / den(g);
    }
    return out;
}

double theorem1_bound(const Vector& beta, double lambda_min, Index m, Index p, Index a, double tau)
{
    if (!(lambda_min > 0.0)) throw Error(ErrorCode::InvalidArgument, "theorem1_bound: lambda_min must be > 0");
    if (m < 1 || m >= p) throw Error(ErrorCode::InvalidArgument, "theorem1_bound: need 1 <= m < p");
    if (a < 1) throw Error(ErrorCode::InvalidArgument, "theorem1_bound: need a >= 1");
    if (beta.size() != p) throw Error(ErrorCode::DimensionMismatch, "theorem1_bound: beta length differs from p");
    double min_abs = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) min_abs = std::min(min_abs, std::abs(beta(j)));
    if (!std::isfinite(min_abs) || std::abs(min_abs - tau) > 1e-12)
        throw Error(ErrorCode::InconsistentTau, "tau is not the smallest nonzero |beta_j|");
    const double pd = static_cast<double>(p);
    const double md = static_cast<double>(m);
    const double ad = static_cast<double>(a);
    return beta.squaredNorm() * lambda_min * (1.0 - 2.0 * md / pd) +
           ad / (pd - 1.0) * md * lambda_min * tau * tau * (1.0 - (md + 1.0) / (pd - 1.0));
}

namespace {

double inverse_first(double p, double m)
{
    return (m / p) * (1.0 - std::pow((m - 1.0) / m, p));
}

} // namespace

std::pair<double, double> inverse_preimage_moments(Index p, Index m)
{
    if (p < 2 || m < 1 || m > p) throw Error(ErrorCode::InvalidArgument, "inverse_preimage_moments: need 1 <= m <= p, p >= 2");
    const double pd = static_cast<double>(p);
    const double md = static_cast<double>(m);
    const double q = pd - 1.0;
    return {inverse_first(pd, md), md * md / (q * q) + (md - 3.0) * md * md / (q * q * q)};
}

std::pair<double, double> active_ratio_moments(Index p, Index m, Index a, bool j_active)
{
    if (p < 2 || m < 1 || m > p) throw Error(ErrorCode::InvalidArgument, "active_ratio_moments: need 1 <= m <= p, p >= 2");
    if (a < 1 || a >= p) throw Error(ErrorCode::InvalidArgument, "active_ratio_moments: need 1 <= a < p");
    const double pd = static_cast<double>(p);
    const double md = static_cast<double>(m);
    const double aj = static_cast<double>(a - (j_active ? 1 : 0));
    const double q = pd - 1.0;
    const double first = aj / q * (1.0 - inverse_first(pd, md));
    const double second = md * aj / q * (1.0 / q - (md + 1.0) / (q * q));
    return {first, second};
}

} // namespace spar
