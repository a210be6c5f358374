#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace gazedepth {

// Shortest decimal text that parses back to the same double. -0 is written as 0.
std::string format_double(double value);

// Strict full-string parse; nullopt on any trailing or missing characters.
std::optional<double> parse_double(std::string_view text);

}  // namespace gazedepth
