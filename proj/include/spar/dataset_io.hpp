#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "spar/types.hpp"

namespace spar {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Header x1..xp,y then one row per observation.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Reads a CSV with a header. The column named `y` is the response; every
/// other column is a predictor, in file order. Throws ParseError when `y` is
/// missing or a cell is not numeric.
Dataset read_dataset_csv(std::istream& in);

/// Predictor matrix from a CSV; a `y` column, if present, is skipped.
Matrix read_predictors_csv(std::istream& in);

/// JSON sidecar with beta, mu, sigma2 and the (0-based) active set.
std::string truth_to_json(const Truth& truth);
Truth truth_from_json(std::string_view text);

} // namespace spar
