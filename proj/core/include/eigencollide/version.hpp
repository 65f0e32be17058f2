#pragma once

namespace eigencollide {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eigencollide
