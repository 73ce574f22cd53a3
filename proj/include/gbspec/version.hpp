#pragma once

namespace gbspec {
inline constexpr const char* kVersion = "0.1.0";
}
