#pragma once

namespace ptproc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ptproc
