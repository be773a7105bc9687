#pragma once

namespace berryoptics {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace berryoptics
