#pragma once

#include <cstdint>
#include <random>

namespace tailgame {

// Independent, reproducible generator streams derived from one run seed.
enum class Stream : std::uint32_t {
  kSynthetic = 1,
  kSplit = 2,
  kDownsample = 3,
  kInit = 4,
  kShuffle = 5,
};

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace tailgame
