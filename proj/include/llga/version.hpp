#pragma once

namespace llga {
inline constexpr const char* kVersion = "1.0.0";
}
