#include "spar/kernels.hpp"

#include <cmath>

#include "spar/error.hpp"
#include "spar/numeric.hpp"

namespace spar::kernels {

namespace {

Index source_column(std::span<const Index> columns, Index j)
{
    return columns.empty() ? j : columns[static_cast<std::size_t>(j)];
}

// Column g of Z, accumulated over the bucket in ascending column order.
void cw_fill_column(const CwProjection& proj, const Matrix& X, std::span<const Index> columns,
                    const std::vector<Index>& bucket, Matrix& Z, Index g)
{
    auto z = Z.col(g);
    z.setZero();
    for (Index j : bucket) z += proj.d(j) * X.col(source_column(columns, j));
}

} // namespace

Matrix cw_apply_serial(const CwProjection& proj, const Matrix& X, std::span<const Index> columns)
{
    Matrix Z = Matrix::Zero(X.rows(), proj.m);
    for (Index j = 0; j < proj.p_cols(); ++j)
        Z.col(proj.goal[static_cast<std::size_t>(j)]) += proj.d(j) * X.col(source_column(columns, j));
    return Z;
}

Matrix cw_apply_omp(const CwProjection& proj, const Matrix& X, std::span<const Index> columns)
{
    const auto buckets = proj.buckets();
    Matrix Z(X.rows(), proj.m);
    const Index m = proj.m;
#pragma omp parallel for schedule(static) if (X.rows() * proj.p_cols() > 200000)
    for (Index g = 0; g < m; ++g) cw_fill_column(proj, X, columns, buckets[static_cast<std::size_t>(g)], Z, g);
    return Z;
}

namespace {

MemberFit fit_member(const Matrix& X, const Vector& y, const ModelStructure& member, double fallback_jitter)
{
    MemberFit fit;
    fit.Z = cw_apply_serial(member.projection, X, member.indices);
    fit.gamma = with_jitter_fallback([&](double jitter) { return ols_reduced(fit.Z, y, jitter); }, fallback_jitter);
    return fit;
}

} // namespace

std::vector<MemberFit> fit_members_serial(const Matrix& X, const Vector& y,
                                          std::span<const ModelStructure> members, double fallback_jitter)
{
    std::vector<MemberFit> out(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) out[k] = fit_member(X, y, members[k], fallback_jitter);
    return out;
}

std::vector<MemberFit> fit_members_omp(const Matrix& X, const Vector& y,
                                       std::span<const ModelStructure> members, double fallback_jitter)
{
    std::vector<MemberFit> out(members.size());
    const auto count = static_cast<std::ptrdiff_t>(members.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        try {
            out[static_cast<std::size_t>(k)] = fit_member(X, y, members[static_cast<std::size_t>(k)], fallback_jitter);
        } catch (...) {
#pragma omp critical(spar_fit_members)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

namespace {

std::vector<std::vector<double>> fold_mse(const CvProblem& pr, int fold)
{
    const Matrix& X = *pr.X;
    const Vector& y = *pr.y;
    std::vector<Index> train, test;
    for (std::size_t i = 0; i < pr.fold_of.size(); ++i) (pr.fold_of[i] == fold ? test : train).push_back(static_cast<Index>(i));
    if (test.empty() || train.empty()) throw Error(ErrorCode::FoldTooSmall, "cross-validation fold is empty");

    const auto n_test = static_cast<Index>(test.size());
    const auto n_train = static_cast<Index>(train.size());
    Vector y_train(n_train), y_test(n_test);
    for (Index i = 0; i < n_train; ++i) y_train(i) = y(train[static_cast<std::size_t>(i)]);
    for (Index i = 0; i < n_test; ++i) y_test(i) = y(test[static_cast<std::size_t>(i)]);

    const std::size_t n_lambda = pr.thresholds.size();
    std::vector<Vector> cumulative(n_lambda, Vector::Zero(n_test));
    std::vector<std::vector<double>> mse(pr.members.size(), std::vector<double>(n_lambda, 0.0));

    for (std::size_t k = 0; k < pr.members.size(); ++k) {
        const ModelStructure& member = pr.members[k];
        const Matrix& Z = pr.full_fits[k].Z;
        Matrix Z_train(n_train, Z.cols());
        for (Index i = 0; i < n_train; ++i) Z_train.row(i) = Z.row(train[static_cast<std::size_t>(i)]);
        const Vector gamma = with_jitter_fallback(
            [&](double jitter) { return ols_reduced(Z_train, y_train, jitter); }, pr.fallback_jitter);
        const Vector b = lift_coefficients(member.projection, gamma);

        const auto width = static_cast<Index>(member.indices.size());
        Matrix X_test(n_test, width);
        for (Index c = 0; c < width; ++c)
            for (Index i = 0; i < n_test; ++i)
                X_test(i, c) = X(test[static_cast<std::size_t>(i)], member.indices[static_cast<std::size_t>(c)]);

        const double models = static_cast<double>(k + 1);
        for (std::size_t l = 0; l < n_lambda; ++l) {
            const double lambda = pr.thresholds[l];
            Vector& cum = cumulative[l];
            for (Index c = 0; c < width; ++c)
                if (std::abs(b(c)) >= lambda) cum += b(c) * X_test.col(c);
            mse[k][l] = (y_test - cum / models).squaredNorm() / static_cast<double>(n_test);
        }
    }
    return mse;
}

} // namespace

FoldMse cv_fold_mse_serial(const CvProblem& problem)
{
    FoldMse out(static_cast<std::size_t>(problem.folds));
    for (int f = 0; f < problem.folds; ++f) out[static_cast<std::size_t>(f)] = fold_mse(problem, f);
    return out;
}

FoldMse cv_fold_mse_omp(const CvProblem& problem)
{
    FoldMse out(static_cast<std::size_t>(problem.folds));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < problem.folds; ++f) {
        try {
            out[static_cast<std::size_t>(f)] = fold_mse(problem, f);
        } catch (...) {
#pragma omp critical(spar_cv_folds)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

} // namespace spar::kernels
