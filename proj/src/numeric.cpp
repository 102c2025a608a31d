#include "spar/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace spar {

void Dataset::validate() const
{
    if (X.rows() != y.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "X has " + std::to_string(X.rows()) + " rows but y has " +
                        std::to_string(y.size()) + " entries");
    if (truth) {
        if (truth->beta.size() != X.cols())
            throw Error(ErrorCode::DimensionMismatch, "truth beta length differs from p");
        if (truth->active_set != support_of(truth->beta))
            throw Error(ErrorCode::InvalidArgument, "truth active_set is not the support of beta");
    }
}

Dataset Dataset::subset_rows(const std::vector<Index>& rows) const
{
    Dataset out;
    out.X.resize(static_cast<Index>(rows.size()), X.cols());
    out.y.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Index>(i)) = X.row(rows[i]);
        out.y(static_cast<Index>(i)) = y(rows[i]);
    }
    out.truth = truth;
    return out;
}

IndexSet support_of(const Vector& beta)
{
    IndexSet s;
    for (Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) s.push_back(j);
    return s;
}

namespace {

double sample_sd(const Eigen::Ref<const Vector>& v, double mean)
{
    const Index n = v.size();
    return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(n - 1));
}

// sd at the level of accumulated rounding noise counts as zero
bool is_constant(double sd, double mean)
{
    return sd <= 1e-14 * std::max(1.0, std::abs(mean));
}

} // namespace

std::pair<Dataset, Standardization> standardize(const Dataset& data)
{
    data.validate();
    const Index n = data.n();
    const Index p = data.p();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "standardize needs n >= 2");

    Standardization st;
    st.y_center = data.y.mean();
    st.y_scale = sample_sd(data.y, st.y_center);
    if (is_constant(st.y_scale, st.y_center) || !std::isfinite(st.y_scale))
        throw Error(ErrorCode::ZeroVarianceResponse, "response has zero sample variance");

    st.x_center.resize(p);
    st.x_scale.resize(p);
    Dataset out;
    out.X.resize(n, p);
    for (Index j = 0; j < p; ++j) {
        const double mean = data.X.col(j).mean();
        const double sd = sample_sd(data.X.col(j), mean);
        st.x_center(j) = mean;
        if (is_constant(sd, mean)) {
            st.x_scale(j) = 1.0;
            st.constant_columns.push_back(j);
            out.X.col(j).setZero();
        } else {
            st.x_scale(j) = sd;
            out.X.col(j) = (data.X.col(j).array() - mean) / sd;
        }
    }
    out.y = (data.y.array() - st.y_center) / st.y_scale;
    return {std::move(out), std::move(st)};
}

Matrix Standardization::transform_x(const Matrix& X) const
{
    if (X.cols() != x_center.size())
        throw Error(ErrorCode::DimensionMismatch, "column count differs from fitted standardization");
    Matrix Z = (X.rowwise() - x_center.transpose()).array().rowwise() / x_scale.transpose().array();
    for (Index j : constant_columns) Z.col(j).setZero();
    return Z;
}

Dataset Standardization::restore(const Dataset& standardized) const
{
    Dataset out;
    out.X = (standardized.X.array().rowwise() * x_scale.transpose().array()).rowwise() +
            x_center.transpose().array();
    out.y = standardized.y.array() * y_scale + y_center;
    out.truth = standardized.truth;
    return out;
}

Vector Standardization::coefficients_to_original(const Vector& beta_std) const
{
    Vector b = beta_std.array() * (y_scale / x_scale.array());
    for (Index j : constant_columns) b(j) = 0.0;
    return b;
}

double Standardization::intercept_for(const Vector& beta_orig) const
{
    return y_center - x_center.dot(beta_orig);
}

std::pair<Matrix, Vector> center_columns(const Matrix& X)
{
    Vector mean = X.colwise().mean().transpose();
    Matrix Xc = X.rowwise() - mean.transpose();
    return {std::move(Xc), std::move(mean)};
}

Matrix solve_spd(const Matrix& A, const Matrix& B, double jitter)
{
    if (A.rows() != A.cols() || A.rows() != B.rows())
        throw Error(ErrorCode::DimensionMismatch, "solve_spd: incompatible shapes");
    if (jitter < 0.0 || !std::isfinite(jitter))
        throw Error(ErrorCode::InvalidArgument, "jitter must be finite and >= 0");
    const Index dim = A.rows();

    auto attempt = [&](double ridge, double min_rcond) -> std::optional<Matrix> {
        Matrix M = A;
        M.diagonal().array() += ridge;
        Eigen::LLT<Matrix> llt(M);
        if (llt.info() != Eigen::Success) return std::nullopt;
        if (llt.rcond() < min_rcond) return std::nullopt;
        Matrix x = llt.solve(B);
        if (!x.allFinite()) return std::nullopt;
        return x;
    };

    if (jitter > 0.0) {
        if (auto x = attempt(jitter, 0.0)) return *x;
        throw Error(ErrorCode::SingularGram, "regularized Gram matrix is not positive definite");
    }
    if (auto x = attempt(0.0, 1e-12)) return *x;
    const double trace = A.diagonal().sum();
    if (trace > 0.0 && std::isfinite(trace)) {
        if (auto x = attempt(1e-10 * trace / static_cast<double>(dim), 0.0)) return *x;
    }
    throw Error(ErrorCode::SingularGram, "Gram matrix is numerically singular");
}

Vector ridge_dual(const Matrix& X, const Vector& y, double lambda)
{
    if (X.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "ridge_dual: X rows != y length");
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge_dual: lambda must be > 0");
    Matrix G = X * X.transpose();
    G.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::SingularSystem, "ridge_dual: n x n system could not be factored");
    Vector alpha = llt.solve(y);
    if (!alpha.allFinite()) throw Error(ErrorCode::SingularSystem, "ridge_dual: non-finite solution");
    return X.transpose() * alpha;
}

Vector holp(const Matrix& X, const Vector& y, double jitter)
{
    if (X.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "holp: X rows != y length");
    const Matrix G = X * X.transpose();
    const Vector alpha = solve_spd(G, y, jitter);
    return X.transpose() * alpha;
}

Vector ols_reduced(const Matrix& Z, const Vector& y, double jitter)
{
    if (Z.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "ols_reduced: Z rows != y length");
    const Matrix G = Z.transpose() * Z;
    const Vector rhs = Z.transpose() * y;
    return solve_spd(G, rhs, jitter);
}

} // namespace spar
