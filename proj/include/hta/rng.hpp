#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace hta {

// splitmix64 step; used for seed expansion and substream key mixing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64-derived state. All distributions are
// inverse-CDF based so that streams are reproducible bit-for-bit across
// platforms and standard-library versions.
class Rng {
 public:
  Rng() : Rng(0) {}

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64(sm);
  }

  // Independent generator for a named substream, e.g.
  // Rng::stream(seed, {size, mu_index, solver_id, replicate}).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = seed;
    (void)splitmix64(h);
    for (std::uint64_t k : keys) {
      h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      (void)splitmix64(h);
    }
    return Rng(h);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Log-uniform over [lo, hi], lo > 0.
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t state_[4];
};

// Compensated (Neumaier) summation; keeps large time-fraction sums stable
// independently of accumulation order within a fixed traversal.
class KahanSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (!std::isfinite(t)) {  // overflowed terms pass through uncompensated
      sum_ = t;
      return;
    }
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return std::isfinite(sum_) ? sum_ + comp_ : sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace hta
