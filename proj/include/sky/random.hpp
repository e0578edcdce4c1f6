// Seeded RNG helpers with a fixed algorithm, so that identical seeds give
// identical outputs on every platform (std::uniform_int_distribution is
// implementation-defined and unsuitable for reproducible files).
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sky/error.hpp"

namespace sky {

// splitmix64, the usual seeding/stream generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound). Rejection-free modulo is fine here: the
  // bias is < 2^-32 for desk-scale bounds and determinism is what matters.
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

  // Uniform double in [0, 1).
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = next_double();
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Uniform without-replacement sample of `size` indices out of [0, n),
// in selection order (reservoir algorithm R).
inline std::vector<std::size_t> reservoir_sample(std::size_t n, std::size_t size, std::uint64_t seed) {
  if (size > n) fail(Errc::sample_too_large, "sample size exceeds population");
  std::vector<std::size_t> picked(size);
  for (std::size_t i = 0; i < size; ++i) picked[i] = i;
  Rng rng(seed);
  for (std::size_t i = size; i < n; ++i) {
    std::size_t j = rng.next_below(i + 1);
    if (j < size) picked[j] = i;
  }
  return picked;
}

}  // namespace sky
