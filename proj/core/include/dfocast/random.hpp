#pragma once

#include <cstdint>
#include <random>

namespace dfocast {

/// Engine for one (seed, stream) pair; distinct streams give unrelated
/// sequences from the same user seed.
inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  return std::mt19937_64(seq);
}

}  // namespace dfocast
