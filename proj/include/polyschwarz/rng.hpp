#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace polyschwarz {

/// Deterministic random stream. mt19937_64 is bit-identical everywhere; the
/// uniform conversion avoids std::uniform_real_distribution, whose output is
/// implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform point on the complex unit circle.
  std::complex<double> unit_phase() {
    const double theta = 2.0 * pi() * uniform();
    return {std::cos(theta), std::sin(theta)};
  }

  /// Complex gaussian via Box-Muller (radius sqrt relation keeps both
  /// components standard normal).
  std::complex<double> gaussian() {
    double u = uniform();
    while (u == 0.0) u = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * pi() * uniform();
    return {r * std::cos(theta) / std::sqrt(2.0), r * std::sin(theta) / std::sqrt(2.0)};
  }

  /// Unit vector in C^n (euclidean norm 1), gaussian direction.
  std::vector<std::complex<double>> unit_vector(int n) {
    std::vector<std::complex<double>> v(n);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (auto& c : v) {
        c = gaussian();
        norm2 += std::norm(c);
      }
    } while (norm2 < 1e-30);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : v) c *= inv;
    return v;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  static constexpr double pi() { return 3.14159265358979323846; }
  std::mt19937_64 engine_;
};

inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

}  // namespace polyschwarz
