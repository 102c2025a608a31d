#include "spar/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spar/error.hpp"
#include "spar/numeric.hpp"

namespace spar {

ScreeningScores marginal_correlation_scores(const Dataset& data)
{
    data.validate();
    if (data.n() < 3) throw Error(ErrorCode::InvalidArgument, "marginal correlation needs n >= 3");
    const Vector yc = data.y.array() - data.y.mean();
    const double y_norm = yc.norm();
    if (!(y_norm > 1e-14 * std::max(1.0, std::abs(data.y.mean()))))
        throw Error(ErrorCode::ZeroVarianceResponse, "response has zero sample variance");

    ScreeningScores out;
    out.source = ScoreSource::MarginalCorrelation;
    out.scores.resize(data.p());
    for (Index j = 0; j < data.p(); ++j) {
        const double mean = data.X.col(j).mean();
        const Vector xc = data.X.col(j).array() - mean;
        const double x_norm = xc.norm();
        if (!(x_norm > 1e-14 * std::max(1.0, std::abs(mean)) * std::sqrt(static_cast<double>(data.n())))) {
            out.scores(j) = 0.0;
            continue;
        }
        out.scores(j) = std::min(1.0, std::abs(xc.dot(yc)) / (x_norm * y_norm));
    }
    return out;
}

ScreeningScores holp_scores(const Dataset& data, double jitter)
{
    data.validate();
    auto [Xc, mean] = center_columns(data.X);
    const Vector yc = data.y.array() - data.y.mean();
    ScreeningScores out;
    out.source = ScoreSource::Holp;
    out.scores = holp(Xc, yc, jitter).cwiseAbs();
    return out;
}

ScreeningScores ridge_scores(const Dataset& data, double lambda)
{
    data.validate();
    auto [Xc, mean] = center_columns(data.X);
    const Vector yc = data.y.array() - data.y.mean();
    ScreeningScores out;
    out.source = ScoreSource::RidgeFixed;
    out.lambda = lambda;
    out.scores = ridge_dual(Xc, yc, lambda).cwiseAbs();
    return out;
}

ScreeningScores ridge_cv_scores(const Dataset& data, Rng& rng, int folds, int grid_size)
{
    data.validate();
    const Index n = data.n();
    if (folds < 2 || n < 2 * folds) throw Error(ErrorCode::FoldTooSmall, "ridge CV needs n >= 2 * folds");
    if (grid_size < 1) throw Error(ErrorCode::InvalidArgument, "ridge CV grid must be nonempty");
    auto [Xc, mean] = center_columns(data.X);
    const Vector yc = data.y.array() - data.y.mean();

    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = static_cast<int>(i % folds);

    const double scale = Xc.squaredNorm() / static_cast<double>(n);
    std::vector<double> grid(static_cast<std::size_t>(grid_size));
    for (int g = 0; g < grid_size; ++g) {
        const double t = grid_size == 1 ? 0.5 : static_cast<double>(g) / (grid_size - 1);
        grid[static_cast<std::size_t>(g)] = scale * std::pow(10.0, -4.0 + 6.0 * t);
    }

    std::vector<double> sse(grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        std::vector<Index> train, test;
        for (Index i = 0; i < n; ++i) (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        Matrix Xtr(static_cast<Index>(train.size()), Xc.cols());
        Vector ytr(static_cast<Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) {
            Xtr.row(static_cast<Index>(i)) = Xc.row(train[i]);
            ytr(static_cast<Index>(i)) = yc(train[i]);
        }
        const Vector tr_mean = Xtr.colwise().mean().transpose();
        const double ytr_mean = ytr.mean();
        Xtr.rowwise() -= tr_mean.transpose();
        ytr.array() -= ytr_mean;
        Matrix Xte(static_cast<Index>(test.size()), Xc.cols());
        Vector yte(static_cast<Index>(test.size()));
        for (std::size_t i = 0; i < test.size(); ++i) {
            Xte.row(static_cast<Index>(i)) = Xc.row(test[i]) - tr_mean.transpose();
            yte(static_cast<Index>(i)) = yc(test[i]);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(Xtr * Xtr.transpose());
        const Matrix K = Xte * Xtr.transpose() * eig.eigenvectors();
        const Vector uty = eig.eigenvectors().transpose() * ytr;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const Vector coef = uty.array() / (eig.eigenvalues().array().max(0.0) + grid[g]);
            const Vector pred = (K * coef).array() + ytr_mean;
            sse[g] += (yte - pred).squaredNorm();
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(sse.begin(), sse.end()) - sse.begin());
    ScreeningScores out = ridge_scores(data, grid[best]);
    out.source = ScoreSource::RidgeCv;
    return out;
}

IndexSet top_k(const ScreeningScores& scores, Index k)
{
    const Index p = scores.scores.size();
    if (k < 1 || k > p) throw Error(ErrorCode::InvalidArgument, "top_k: k must lie in [1, p]");
    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    const auto& s = scores.scores;
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
        if (s(a) != s(b)) return s(a) > s(b);
        return a < b;
    });
    IndexSet out(order.begin(), order.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

ScreenDraw probabilistic_screen(const ScreeningScores& scores, Index size, Rng& rng)
{
    if (size < 1) throw Error(ErrorCode::InvalidArgument, "probabilistic_screen: size must be >= 1");
    const auto& s = scores.scores;
    std::vector<std::pair<double, Index>> keys;
    keys.reserve(static_cast<std::size_t>(s.size()));
    // Exponential race: the order of E_j / w_j with E_j ~ Exp(1) is exactly
    // the successive-sampling order.
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Index j = 0; j < s.size(); ++j) {
        if (!(s(j) >= 0.0) || !std::isfinite(s(j)))
            throw Error(ErrorCode::InvalidArgument, "scores must be finite and nonnegative");
        if (s(j) == 0.0) continue;
        const double e = -std::log1p(-unif(rng)); // 1 - u in (0, 1]
        keys.emplace_back(e / s(j), j);
    }
    ScreenDraw out;
    const auto positive = static_cast<Index>(keys.size());
    Index take = size;
    if (positive < size) {
        out.downgraded = true;
        take = positive;
    }
    std::partial_sort(keys.begin(), keys.begin() + take, keys.end());
    out.indices.reserve(static_cast<std::size_t>(take));
    for (Index i = 0; i < take; ++i) out.indices.push_back(keys[static_cast<std::size_t>(i)].second);
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

ScreeningReport screening_report(const IndexSet& selected, const Vector& estimate, const Vector& truth)
{
    if (estimate.size() != truth.size())
        throw Error(ErrorCode::DimensionMismatch, "screening_report: estimate and truth lengths differ");
    ScreeningReport r;
    r.k = static_cast<Index>(selected.size());
    Index true_active = 0;
    for (Index j = 0; j < truth.size(); ++j)
        if (truth(j) != 0.0) ++true_active;

    std::vector<double> est, tru;
    Index sign_hits = 0;
    for (Index j : selected) {
        if (truth(j) == 0.0) continue;
        est.push_back(estimate(j));
        tru.push_back(truth(j));
        if ((estimate(j) > 0.0 && truth(j) > 0.0) || (estimate(j) < 0.0 && truth(j) < 0.0)) ++sign_hits;
    }
    const auto hits = static_cast<Index>(est.size());
    r.precision = r.k > 0 ? static_cast<double>(hits) / static_cast<double>(r.k) : 0.0;
    r.recall = true_active > 0 ? static_cast<double>(hits) / static_cast<double>(true_active) : 0.0;
    r.sign_ratio = hits > 0 ? static_cast<double>(sign_hits) / static_cast<double>(hits) : 0.0;
    if (hits >= 2) {
        const Eigen::Map<const Vector> e(est.data(), hits), t(tru.data(), hits);
        const Vector ec = e.array() - e.mean();
        const Vector tc = t.array() - t.mean();
        const double denom = ec.norm() * tc.norm();
        r.coef_correlation = denom > 0.0 ? ec.dot(tc) / denom : 0.0;
    }
    return r;
}

} // namespace spar
