#pragma once

#include <cstdint>

namespace ptinv {

/// SplitMix64 finalizer; a cheap bijective mixer for deriving child seeds.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t x);

/// Deterministic child seed for stream `stream` of `root`. Distinct streams of
/// the same root give statistically independent generators.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace ptinv
