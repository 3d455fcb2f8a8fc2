#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gbmlab {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for stream `stream` of base seed `seed`. Distinct (seed, stream)
// pairs map to decorrelated 64-bit seeds.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

// Standard normal draws from one explicitly seeded stream.
std::vector<double> normal_draws(std::uint64_t seed, std::size_t count);

}  // namespace gbmlab
