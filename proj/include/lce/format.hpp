#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lce {

// Fixed-point with `digits` decimals; negative zero prints as zero.
std::string format_fixed(double value, int digits);

// Shortest round-trippable-enough general format used for reals in CSV output.
std::string format_real(double value);

// Quote a CSV field only when it contains a separator, quote or newline.
std::string csv_escape(std::string_view field);

// Split one CSV line honouring double-quoted fields.
std::vector<std::string> csv_split(std::string_view line);

std::string trim(std::string_view s);

}  // namespace lce
