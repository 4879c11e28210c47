#pragma once

#include <bit>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace bellsim {

/// In-place unnormalized Walsh-Hadamard transform:
/// out[c] = sum_k (-1)^{popcount(c & k)} in[k]. Length must be a power of two.
template <class T>
void fwht(std::span<T> data) {
  const std::size_t n = data.size();
  if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("fwht: length must be a power of two");
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t block = 0; block < n; block += 2 * half) {
      for (std::size_t k = block; k < block + half; ++k) {
        const T u = data[k];
        const T v = data[k + half];
        data[k] = u + v;
        data[k + half] = u - v;
      }
    }
  }
}

inline bool parity(std::size_t v) noexcept { return (std::popcount(v) & 1) != 0; }

}  // namespace bellsim
