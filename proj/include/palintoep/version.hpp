#pragma once

namespace palintoep {

inline constexpr const char* kVersion = "0.1.0";

} // namespace palintoep
