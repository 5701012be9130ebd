#pragma once

namespace azb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace azb
