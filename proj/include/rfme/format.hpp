#pragma once

#include <string>

namespace rfme {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace rfme
