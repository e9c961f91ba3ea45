#pragma once

namespace vmf {
inline constexpr const char* kVersion = "0.1.0";
}
