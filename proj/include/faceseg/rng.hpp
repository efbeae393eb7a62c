#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace faceseg {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Seed for an independent stream keyed by (seed, purpose...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::string_view> keys) {
  std::uint64_t h = splitmix64(seed);
  for (auto k : keys) h = splitmix64(h ^ fnv1a64(k));
  return h;
}

// Named, seedable stream. The engine's output sequence is fixed by the C++
// standard; integer draws and shuffles are implemented here so results do not
// depend on the standard library's distribution code.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view purpose) : engine_(derive_seed(seed, {purpose})) {}

  Rng fork(std::string_view purpose) { return Rng(engine_(), purpose); }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t uniform(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace faceseg
