#pragma once

#include <cstdint>
#include <random>

namespace chronoface {

// Seeded random source with hand-rolled variate transforms. std::mt19937_64
// output is pinned by the standard, and keeping the transforms in-repo
// (instead of the implementation-defined std distributions) makes every
// sampled world reproducible byte for byte across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform01_open() { return 1.0 - uniform01(); }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  double normal();  // standard normal, Box-Muller with spare caching

  double gamma(double shape);  // unit scale, shape > 0

  double beta(double a, double b);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace chronoface
