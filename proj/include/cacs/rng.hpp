#ifndef CACS_RNG_HPP
#define CACS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cacs {

// Seeded N(0,1) stream. mt19937_64 is pinned by the standard, but
// std::normal_distribution is implementation-defined, so sampling uses an
// explicit Box-Muller transform: fixtures reproduce bit-identically across
// platforms and standard libraries.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0,1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // One uniform draw in [0,1) from the top 53 bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cacs

#endif  // CACS_RNG_HPP
