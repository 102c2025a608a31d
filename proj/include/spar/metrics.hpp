#pragma once

#include "spar/types.hpp"

namespace spar {

struct SelectionScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Index num_active = 0;
};

struct EvalResult {
    double rmspe = 0.0;
    double mspe = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Index num_active = 0;
    double runtime_seconds = 0.0;
};

/// sum (y_hat - y)^2 / sum (y - y_bar_train)^2. Throws DegenerateDenominator
/// when the denominator is zero.
double rmspe(const Vector& y_hat, const Vector& y_test, double y_bar_train);

/// Mean squared prediction error.
double mspe(const Vector& y_hat, const Vector& y_test);

/// Support-based precision, recall and F1. Precision is 0 for an all-zero estimate.
SelectionScores selection_scores(const Vector& beta_hat, const Vector& beta_true);

/// Harmonic mean of precision and recall, 0 unless both are positive.
double f1_score(double precision, double recall);

} // namespace spar
