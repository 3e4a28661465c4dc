#pragma once

namespace compvar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace compvar
