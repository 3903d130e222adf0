#pragma once

#include <cstdint>
#include <random>

namespace saddle {

/// SplitMix64 finalizer.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the `index`-th substream of `seed`: the (index+1)-th output of a
/// SplitMix64 stream started at `seed`. Distinct indices give decorrelated,
/// platform-independent seeds.
[[nodiscard]] std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// mt19937_64 with a portable uniform-double conversion (53 high bits), so
/// draws are bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  [[nodiscard]] std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace saddle
