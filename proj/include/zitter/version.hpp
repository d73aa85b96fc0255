#pragma once

namespace zitter {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace zitter
