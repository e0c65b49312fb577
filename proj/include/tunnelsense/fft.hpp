#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tunnelsense/errors.hpp"

namespace tunnelsense {

// In-place iterative radix-2 FFT. Sizes are powers of two throughout the
// toolkit (tracker FFT lengths and rate-estimation padding), so a compact
// radix-2 kernel is all we need. Twiddles come straight from polar() per
// index; no recurrences, so accuracy stays at the eps*log2(n) level.
inline void fft_radix2(std::vector<std::complex<double>>& x,
                       bool inverse = false) {
  const std::size_t n = x.size();
  if (n <= 1) return;
  require(std::has_single_bit(n), errc::invalid_argument,
          "fft: size must be a power of two");

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    twiddle[k] = std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                     static_cast<double>(k) /
                                     static_cast<double>(n));
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> even = x[start + k];
        std::complex<double> odd = x[start + k + len / 2] * twiddle[k * stride];
        x[start + k] = even + odd;
        x[start + k + len / 2] = even - odd;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= scale;
  }
}

inline std::size_t next_pow2(std::size_t n) {
  return n <= 1 ? 1 : std::bit_ceil(n);
}

}  // namespace tunnelsense
