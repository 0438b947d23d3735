#pragma once

namespace elliptica {
inline constexpr const char* kVersion = "0.1.0";
}
