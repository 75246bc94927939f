#pragma once

#include <cmath>
#include <cstdint>

namespace hebbdual {

// Deterministic, cross-platform random numbers.  All synthetic data in this
// project flows through this generator so that a (kind, parameters, seed)
// triple reproduces byte-identical datasets anywhere.  std::mt19937 with the
// standard distributions is not bit-stable across library implementations,
// hence the explicit algorithms:
//
//  * seed expansion: splitmix64
//  * stream: xoshiro256** (Blackman & Vigna, public-domain reference)
//  * uniform double in [0,1): top 53 bits scaled by 2^-53
//  * standard normal: Box-Muller, exactly two uniform draws per call,
//    normal = sqrt(-2 ln(1-u1)) * cos(2 pi u2)

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& word : state_) word = splitmix64_next(seed);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {
    const double u1 = 1.0 - uniform01();  // (0,1], keeps the log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::uint64_t state_[4];
};

}  // namespace hebbdual
