#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Core>

namespace handover {

// Deterministic RNG: mt19937_64 with hand-rolled variate transforms so that
// streams are reproducible bit-for-bit regardless of the standard library's
// distribution implementations. Copyable and equality-comparable, which lets
// simulation state snapshots be compared exactly.
class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1): top 53 bits of one engine draw.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Isotropic unit vector; resamples in the (measure-zero) degenerate case.
  Eigen::Vector3d unit_vector() {
    for (;;) {
      const Eigen::Vector3d v{normal(), normal(), normal()};
      const double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

  bool operator==(const Rng& o) const { return engine_ == o.engine_; }

 private:
  std::mt19937_64 engine_;
};

// Stateless 64-bit mix (splitmix64 finalizer) used to derive disjoint
// episode seeds from (base seed, cell index, episode index).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t episode_seed(std::uint64_t base, std::uint64_t cell,
                                  std::uint64_t episode) {
  return mix64(mix64(base + mix64(cell)) + episode);
}

}  // namespace handover
