#pragma once

namespace ringwell {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ringwell
