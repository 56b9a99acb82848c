#pragma once

#include <string>

namespace commfact {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_shortest(double x);

/// Parses the whole of `text` as a double; false on any leftover character.
bool parse_double(const std::string& text, double& out);

}  // namespace commfact
