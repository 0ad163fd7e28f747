#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace haarfact {

// splitmix64 finalizer; whitens (seed, counter) pairs into engine seeds so
// every sample/try/stream gets an independent, schedule-independent substream
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t item = 0) {
  return mix64(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ull)) ^
               mix64(item + 0x9e6c63d0876a9a47ull));
}

// mt19937_64 with hand-rolled output mappings; the engine sequence is fixed
// by the standard, and we avoid std distributions whose output is
// implementation defined
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t item = 0)
      : eng_(substream_seed(seed, stream, item)) {}

  std::uint64_t bits() { return eng_(); }

  // [0, 1)
  double u01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // (0, 1]
  double u01_open0() {
    return static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  int sign() { return (bits() >> 63) ? -1 : 1; }

  // Box-Muller, second value cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = u01_open0();
    double v = u01();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 6.283185307179586476925286766559 * v;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // modulo bias negligible for n << 2^64 and irrelevant for reproducibility
    return bits() % n;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace haarfact
