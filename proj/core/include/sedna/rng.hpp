#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace sedna {

using Rng = std::mt19937_64;

// SplitMix64 finaliser over (seed, stream). Trials and grid points derive their
// own generator from this so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
// body must only write to per-index state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sedna
