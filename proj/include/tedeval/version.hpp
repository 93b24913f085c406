#pragma once

#include <string_view>

namespace tedeval {

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace tedeval
