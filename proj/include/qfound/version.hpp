#pragma once

namespace qfound {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qfound
