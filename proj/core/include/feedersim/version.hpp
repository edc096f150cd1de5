#pragma once

namespace feedersim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace feedersim
