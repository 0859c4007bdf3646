#pragma once

namespace srfed {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace srfed
