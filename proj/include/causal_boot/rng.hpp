#ifndef CAUSAL_BOOT_RNG_HPP
#define CAUSAL_BOOT_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace causal_boot {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive combination of a seed with further keys.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

// Counter-based generator: the i-th output is mix64(key ^ mix64(i)). Streams with
// distinct keys are independent for practical purposes, and any position can be
// reached without stepping through earlier ones. Satisfies
// UniformRandomBitGenerator, but the helpers below are used instead of <random>
// distributions so that outputs do not depend on the standard library vendor.
__extension__ using uint128 = unsigned __int128;

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(mix64(key)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). Lemire's multiply-shift; the bias is below 2^-64 * n.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<uint128>((*this)()) * n) >> 64);
  }

  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_RNG_HPP
