#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace spar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sorted, duplicate-free, 0-based column indices.
using IndexSet = std::vector<Index>;

/// All randomness flows through explicitly passed generators of this type.
using Rng = std::mt19937_64;

/// Ground truth attached to simulated data.
struct Truth {
    Vector beta;
    double mu = 0.0;
    double sigma2 = 0.0;
    IndexSet active_set;
};

/// Predictor rows X (n x p) with response y (length n).
struct Dataset {
    Matrix X;
    Vector y;
    std::optional<Truth> truth;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }

    /// Throws DimensionMismatch / InvalidArgument on a broken invariant.
    void validate() const;

    /// Rows selected by `rows`, truth copied through.
    Dataset subset_rows(const std::vector<Index>& rows) const;
};

/// Indices j with beta_j != 0.
IndexSet support_of(const Vector& beta);

} // namespace spar
