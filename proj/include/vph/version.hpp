#pragma once

namespace vph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vph
