#include "gazedepth/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace gazedepth {

std::string format_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("format_double: non-finite value");
  if (value == 0) value = 0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') return std::nullopt;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last) return std::nullopt;
  return value;
}

}  // namespace gazedepth
