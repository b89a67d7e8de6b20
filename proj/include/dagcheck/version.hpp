#pragma once

namespace dagcheck {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dagcheck
