#pragma once

#include <cmath>
#include <cstdint>

#include "ucb/common.hpp"

namespace ucb {

// Deterministic generator with a fixed bit-level contract, so seeded families
// and noise realizations are reproducible across standard libraries and
// platforms (std::normal_distribution is not pinned by the standard).
// Core is splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  Real uniform() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [a, b)
  Real uniform(Real a, Real b) { return a + (b - a) * uniform(); }

  // standard normal via Box-Muller; consumes two uniforms per pair
  Real normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Real u1 = uniform();
    Real u2 = uniform();
    // avoid log(0)
    if (u1 < 1e-300) u1 = 1e-300;
    const Real mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * kPi * u2);
  }

  Complex complex_normal() {
    const Real re = normal();
    const Real im = normal();
    return Complex(re, im);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  Real spare_ = 0.0;
};

}  // namespace ucb
