#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace zdpot {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// The output for a (key, counter) pair is a pure function, so every Monte
// Carlo path is addressed by (seed, path index, block index) and replays
// byte-for-byte regardless of how paths are distributed across threads.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key);

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }
};

// Sequential 32-bit stream over consecutive Philox blocks of one path:
// counter = (path lo, path hi, block lo, block hi).
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path)
      : key_(Philox4x32::key_from_seed(seed)), path_(path) {}

  std::uint32_t next_u32();

  // floor(u * k) for a 32-bit uniform u; exact for k a power of two.
  std::uint32_t next_below(std::uint32_t k) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next_u32()) * k) >> 32);
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

 private:
  Philox4x32::Key key_;
  std::uint64_t path_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int used_ = 4;
};

// Monte Carlo mean with standard error = sample std / sqrt(samples).
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Sums in index order, so the result does not depend on how the samples were
// produced across threads.
McEstimate summarize_samples(std::span<const double> values, std::uint64_t seed);

}  // namespace zdpot
