#include "zdpot/rng.hpp"

#include <cmath>

namespace zdpot {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint32_t PathStream::next_u32() {
  if (used_ == 4) {
    buf_ = Philox4x32::generate({static_cast<std::uint32_t>(path_),
                                 static_cast<std::uint32_t>(path_ >> 32),
                                 static_cast<std::uint32_t>(block_),
                                 static_cast<std::uint32_t>(block_ >> 32)},
                                key_);
    ++block_;
    used_ = 0;
  }
  return buf_[static_cast<std::size_t>(used_++)];
}

double PathStream::next_double() {
  const std::uint64_t a = next_u32();
  const std::uint64_t b = next_u32();
  return static_cast<double>(((a << 32) | b) >> 11) * 0x1.0p-53;
}

McEstimate summarize_samples(std::span<const double> values, std::uint64_t seed) {
  McEstimate est;
  est.samples = values.size();
  est.seed = seed;
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  est.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

}  // namespace zdpot
