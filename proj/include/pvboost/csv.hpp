#pragma once

#include <string>

namespace pvboost {

/// Shortest decimal representation that round-trips to the same double.
/// Locale-independent and deterministic, so CSV output is byte-stable.
std::string format_double(double v);

/// Appends format_double(v) to out.
void append_double(std::string& out, double v);

}  // namespace pvboost
