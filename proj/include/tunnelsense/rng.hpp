#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tunnelsense {

// Seeded random stream with explicit samplers. The standard distributions
// are implementation-defined, so we derive everything from raw mt19937_64
// output; a given seed produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; one deviate per call so the stream layout stays obvious.
  double normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double z = std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

  // Inverse-CDF exponential, mean 1/rate.
  double exponential(double rate) {
    return -std::log(1.0 - uniform()) / rate;
  }

  // Pareto with scale x_m and tail index alpha.
  double pareto(double x_m, double alpha) {
    return x_m * std::pow(1.0 - uniform(), -1.0 / alpha);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tunnelsense
