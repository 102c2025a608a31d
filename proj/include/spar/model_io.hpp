#pragma once

#include <string>
#include <string_view>

#include "spar/spar.hpp"

namespace spar {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document: coefficients, intercept, chosen (M, lambda),
/// cv_table and the standardization. Ensemble members are not stored.
std::string model_to_json(const SparModel& model);

/// Parses a document written by model_to_json. The result predicts but has
/// no ensemble members. Throws ParseError on malformed or unknown-version input.
SparModel model_from_json(std::string_view text);

} // namespace spar
