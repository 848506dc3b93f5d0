#pragma once

#include <string>

namespace dietcha {

/// Fixed-point rendering, e.g. format_fixed(24.080000000000002, 2) == "24.08".
std::string format_fixed(double value, int decimals);

/// Shortest round-trip rendering without trailing zeros: 2 -> "2", 0.5 -> "0.5".
std::string format_compact(double value);

/// UTC timestamp with millisecond precision, ISO-8601.
std::string utc_timestamp_now();

}  // namespace dietcha
