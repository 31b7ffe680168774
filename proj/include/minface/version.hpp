#pragma once

#include <cstdint>

namespace minface {

inline constexpr const char* kVersion = "0.1.0";

// Default seed for every randomized routine; fixed so reports reproduce bitwise.
inline constexpr std::uint64_t kDefaultSeed = 12345;

}  // namespace minface
