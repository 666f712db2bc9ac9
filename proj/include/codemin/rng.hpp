#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace codemin {

// splitmix64 finalizer; used to derive independent seeds for sub-streams
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ a);
  h = mix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

// Labels for derive_seed so that different consumers never share a stream.
enum StreamTag : std::uint64_t {
  kStreamInit = 1,
  kStreamSelect = 2,
  kStreamVary = 3,
  kStreamEval = 4,
  kStreamPilot = 5,
  kStreamCombine = 6,
  kStreamLocalOps = 7,
  kStreamTrial = 8,
  kStreamGenerator = 9,
};

/// Seeded generator with distribution helpers whose output is fixed by this
/// code rather than by the standard library's distribution implementations,
/// so runs reproduce bit-for-bit across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // uniform on [0, n); n > 0
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // uniform on [0, 1) with 53 bits
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace codemin
