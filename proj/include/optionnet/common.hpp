#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace optionnet {

using Vec = std::vector<double>;

// splitmix64 finalizer, used to derive independent stream seeds
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  return mix64(master ^ mix64(stream));
}

// Uniform doubles strictly inside (0,1). std::uniform_real_distribution is
// not pinned down by the standard, and sampled points must be reproducible
// bit for bit, so the mapping from raw engine output is done by hand.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform() { return (double)((eng_() >> 11) + 0.5) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace optionnet
