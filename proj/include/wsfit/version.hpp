#pragma once

namespace wsfit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wsfit
