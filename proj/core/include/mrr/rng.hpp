#pragma once

#include <cstdint>
#include <random>

#include "mrr/vec3.hpp"

namespace mrr {

// Seeded generator with platform-independent derived distributions.
// std::mt19937_64 output is fully specified by the standard; the standard
// distributions are not, so uniform and normal draws are derived here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; one spare value is cached.
  double normal();

  // Isotropic unit vector in 3D.
  Vec3 unit_vector();

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_ && a.has_spare_ == b.has_spare_ && a.spare_ == b.spare_;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Combines two seeds into one (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace mrr
