#pragma once

#include <cstdint>

namespace mbqc {

inline constexpr const char* kVersion = "0.1.0";

// Default RNG seed for every CLI command; override per run with --seed or the
// MBQC_SEED environment variable.
inline constexpr std::uint64_t kDefaultSeed = 123456789;

inline constexpr const char* kSeedEnvVar = "MBQC_SEED";

}  // namespace mbqc
