#include "rfme/format.hpp"

#include <array>
#include <charconv>

namespace rfme {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ec == std::errc{} ? ptr : buf.data());
}

}  // namespace rfme
