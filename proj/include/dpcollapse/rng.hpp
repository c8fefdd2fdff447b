#pragma once

#include <cstdint>
#include <random>

namespace dpcollapse {

using Rng = std::mt19937_64;

/// Independent generator for work item `index` of a run seeded with `seed`.
/// The stream depends only on (seed, index), never on scheduling.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x64706373u};
  return Rng(seq);
}

/// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(rng() >> 11) + 0.5) * scale;
}

}  // namespace dpcollapse
