#pragma once

namespace lexikit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lexikit
