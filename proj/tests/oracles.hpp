#pragma once

// Brute-force reference computations used only by the tests. Everything here
// builds dense vectors and matrices and never calls the library's fast paths.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

/// |x_a> = d^{-1/2} sum_k (-1)^{x_k} (-1)^{popcount((a-1) & k)} |k>, built entry by entry.
inline std::vector<cd> bct_vector(std::size_t d, std::size_t x_bits, std::size_t a) {
  std::vector<cd> v(d);
  for (std::size_t k = 0; k < d; ++k) {
    int sign = ((x_bits >> k) & 1U) ? -1 : 1;
    std::size_t and_bits = (a - 1) & k;
    int par = 0;
    while (and_bits) {
      par ^= static_cast<int>(and_bits & 1U);
      and_bits >>= 1;
    }
    if (par) sign = -sign;
    v[k] = sign / std::sqrt(static_cast<double>(d));
  }
  return v;
}

/// psi = sum_k |k>|k> / sqrt(d) as a d^2 vector with index k*d + l.
inline std::vector<cd> max_entangled(std::size_t d) {
  std::vector<cd> psi(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) psi[k * d + k] = 1.0 / std::sqrt(static_cast<double>(d));
  return psi;
}

inline std::vector<cd> kron(const std::vector<cd>& a, const std::vector<cd>& b) {
  std::vector<cd> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

/// <psi|v> with conjugation on psi.
inline cd inner(const std::vector<cd>& psi, const std::vector<cd>& v) {
  cd s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += std::conj(psi[i]) * v[i];
  return s;
}

/// Dense density matrix (row-major, n x n).
struct Density {
  std::size_t n;
  std::vector<cd> m;
};

inline Density noisy_state(std::size_t d, double w) {
  const auto psi = max_entangled(d);
  const std::size_t n = d * d;
  Density rho{n, std::vector<cd>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rho.m[i * n + j] = (1.0 - w) * psi[i] * std::conj(psi[j]);
    rho.m[i * n + i] += w / static_cast<double>(n);
  }
  return rho;
}

/// <v| rho |v>.
inline double expectation(const Density& rho, const std::vector<cd>& v) {
  cd s = 0.0;
  for (std::size_t i = 0; i < rho.n; ++i) {
    for (std::size_t j = 0; j < rho.n; ++j) s += std::conj(v[i]) * rho.m[i * rho.n + j] * v[j];
  }
  return s.real();
}

/// Tr[(|x><x| (x) 1) |psi><psi|] by summing over a full basis on Bob's side.
inline double alice_marginal(const std::vector<cd>& xa, std::size_t d) {
  const auto psi = max_entangled(d);
  double total = 0.0;
  for (std::size_t l = 0; l < d; ++l) {
    std::vector<cd> e(d, 0.0);
    e[l] = 1.0;
    total += std::norm(inner(psi, kron(xa, e)));
  }
  return total;
}

inline std::size_t popcount(std::size_t v) {
  std::size_t c = 0;
  while (v) {
    c += v & 1U;
    v >>= 1;
  }
  return c;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace oracle
