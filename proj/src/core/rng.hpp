#pragma once

#include <cstdint>
#include <random>

namespace gfd {

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform doubles from the top 53 bits; portable unlike std::uniform_real_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  // Index i with probability weights[i]/sum.
  template <class V>
  std::size_t pick(const V& weights) {
    double total = 0;
    for (double w : weights) total += static_cast<double>(w);
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      u -= static_cast<double>(weights[i]);
      if (u < 0) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;)
      if (weights[i] > 0) return i;
    return 0;
  }

 private:
  std::mt19937_64 g_;
};

}  // namespace gfd
