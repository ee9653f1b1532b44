#pragma once

#include <string>
#include <string_view>

#include "hkrig/kernel.hpp"
#include "hkrig/kriging.hpp"
#include "hkrig/optimize.hpp"

namespace hkrig {

// Canonical names used in documents, reports and CLI flags. Parsing is
// case-insensitive and accepts a few common aliases (BFGS, HSADE, HGA, poly2).

std::string to_string(Family f);
std::string to_string(Structure s);
std::string to_string(Estimation e);
std::string to_string(Method m);
/// "Ordinary", "Polynomial1".."Polynomial4" or "External".
std::string trend_name(TrendKind kind, int degree);

Family parse_family(std::string_view s);
Structure parse_structure(std::string_view s);
Estimation parse_estimation(std::string_view s);
Method parse_method(std::string_view s);
/// Returns the polynomial degree, 0 for ordinary.
int parse_trend_degree(std::string_view s);
bool parse_bool(std::string_view s);

}  // namespace hkrig
