#include "spar/metrics.hpp"

#include "spar/error.hpp"

namespace spar {

double rmspe(const Vector& y_hat, const Vector& y_test, double y_bar_train)
{
    if (y_hat.size() != y_test.size()) throw Error(ErrorCode::DimensionMismatch, "rmspe: length mismatch");
    const double denom = (y_test.array() - y_bar_train).square().sum();
    if (!(denom > 0.0)) throw Error(ErrorCode::DegenerateDenominator, "rmspe: test responses all equal the training mean");
    return (y_hat - y_test).squaredNorm() / denom;
}

double mspe(const Vector& y_hat, const Vector& y_test)
{
    if (y_hat.size() != y_test.size()) throw Error(ErrorCode::DimensionMismatch, "mspe: length mismatch");
    if (y_test.size() == 0) throw Error(ErrorCode::InvalidArgument, "mspe: empty input");
    return (y_hat - y_test).squaredNorm() / static_cast<double>(y_test.size());
}

double f1_score(double precision, double recall)
{
    return precision > 0.0 && recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

SelectionScores selection_scores(const Vector& beta_hat, const Vector& beta_true)
{
    if (beta_hat.size() != beta_true.size()) throw Error(ErrorCode::DimensionMismatch, "selection_scores: length mismatch");
    Index selected = 0, truly = 0, both = 0;
    for (Index j = 0; j < beta_hat.size(); ++j) {
        const bool s = beta_hat(j) != 0.0;
        const bool t = beta_true(j) != 0.0;
        selected += s;
        truly += t;
        both += s && t;
    }
    if (truly == 0) throw Error(ErrorCode::InvalidArgument, "selection_scores: true coefficient has no nonzero entry");
    SelectionScores out;
    out.num_active = selected;
    out.precision = selected > 0 ? static_cast<double>(both) / static_cast<double>(selected) : 0.0;
    out.recall = static_cast<double>(both) / static_cast<double>(truly);
    out.f1 = f1_score(out.precision, out.recall);
    return out;
}

} // namespace spar
