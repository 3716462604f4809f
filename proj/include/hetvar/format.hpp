#pragma once

#include <string>

namespace hetvar {

/// Shortest decimal string that parses back to exactly the same double
/// (at most 17 significant digits). Keeps CSV output bit-exact and
/// diffable.
std::string format_double(double value);

/// Strict double parse; throws std::invalid_argument on trailing junk.
double parse_double(const std::string& token);

}  // namespace hetvar
