#pragma once

#include <string>
#include <vector>

namespace oos {

/// Shortest decimal text that reads back to exactly `x`.
std::string format_double(double x);

/// Splits one CSV line; fields may be double-quoted with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

}  // namespace oos
