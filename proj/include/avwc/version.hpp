#pragma once

namespace avwc {

inline constexpr const char* kVersion = "0.1.0";

} // namespace avwc
