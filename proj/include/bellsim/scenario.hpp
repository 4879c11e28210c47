#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "bellsim/bitstring.hpp"
#include "bellsim/errors.hpp"
#include "bellsim/walsh_hadamard.hpp"

namespace bellsim {

/// Outcome 0 means the detector did not click; 1..d are measurement results.
using Outcome = std::uint32_t;

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;
/// d orthonormal vectors; basis[i][k] = <k|x_{i+1}>.
using Basis = std::vector<Vector>;

inline constexpr double kOrthonormalityTol = 1e-9;
inline constexpr double kNormalizationTol = 1e-12;

/// Detector efficiency, the same for both parties, clicks independent.
class Efficiency {
 public:
  explicit Efficiency(double eta) : eta_(eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("efficiency must lie in [0, 1]");
  }
  double value() const noexcept { return eta_; }

 private:
  double eta_;
};

/// Measurement family labelled by d-bit strings, d = 2^n. Never materialized.
struct ImplicitBct {
  unsigned n;
};

struct ExplicitBases {
  std::vector<Basis> alice;
  std::vector<Basis> bob;
};

/// A measurement choice: a d-bit label for the implicit family, a basis index
/// for explicit scenarios.
using Setting = std::variant<BitString, std::size_t>;

/// Maximally entangled state sum_k |k>|k>/sqrt(d) plus a measurement family.
class Scenario {
 public:
  Scenario(std::size_t d, ImplicitBct family) : d_(d), family_(family) {}
  Scenario(std::size_t d, ExplicitBases family) : d_(d), family_(std::move(family)) {}

  std::size_t d() const noexcept { return d_; }
  bool is_bct() const noexcept { return std::holds_alternative<ImplicitBct>(family_); }
  const ImplicitBct& bct() const { return std::get<ImplicitBct>(family_); }
  const ExplicitBases& bases() const { return std::get<ExplicitBases>(family_); }

  /// log2 of |M_A| (= |M_B| for the implicit family).
  double log2_alice_settings() const {
    return is_bct() ? static_cast<double>(d_) : std::log2(static_cast<double>(bases().alice.size()));
  }

  void check_alice(const Setting& x) const { check_setting(x, true); }
  void check_bob(const Setting& y) const { check_setting(y, false); }

 private:
  void check_setting(const Setting& s, bool alice) const {
    if (is_bct()) {
      const auto* bits = std::get_if<BitString>(&s);
      if (bits == nullptr) throw std::invalid_argument("implicit scenario expects bit-string settings");
      if (bits->size() != d_) throw std::invalid_argument("setting length must equal d");
    } else {
      const auto* idx = std::get_if<std::size_t>(&s);
      if (idx == nullptr) throw std::invalid_argument("explicit scenario expects basis-index settings");
      const auto count = alice ? bases().alice.size() : bases().bob.size();
      if (*idx >= count) throw std::invalid_argument("basis index out of range");
    }
  }

  std::size_t d_;
  std::variant<ImplicitBct, ExplicitBases> family_;
};

/// (d+1) x (d+1) outcome distribution for one setting pair.
class JointTable {
 public:
  explicit JointTable(std::size_t d) : d_(d), p_((d + 1) * (d + 1), 0.0) {}

  std::size_t d() const noexcept { return d_; }
  double& at(Outcome a, Outcome b) { return p_[a * (d_ + 1) + b]; }
  double at(Outcome a, Outcome b) const { return p_[a * (d_ + 1) + b]; }

  double total() const { return std::accumulate(p_.begin(), p_.end(), 0.0); }

  /// P(a = b, a != 0).
  double same_click() const {
    double s = 0.0;
    for (Outcome k = 1; k <= d_; ++k) s += at(k, k);
    return s;
  }

  void validate(double tol = kNormalizationTol) const {
    for (double v : p_) {
      if (!(v >= -tol)) throw ValidationError("joint table has a negative entry");
    }
    if (std::abs(total() - 1.0) > tol) {
      throw ValidationError("joint table is not normalized (sum = " + std::to_string(total()) + ")");
    }
  }

 private:
  std::size_t d_;
  std::vector<double> p_;
};

inline Scenario build_bct_scenario(int n) {
  if (n < 2) throw std::invalid_argument("implicit family needs n >= 2");
  if (n > 16) throw std::invalid_argument("implicit family supports n <= 16");
  return Scenario(std::size_t{1} << n, ImplicitBct{static_cast<unsigned>(n)});
}

inline void check_orthonormal(const Basis& basis, std::size_t d, const std::string& where) {
  if (basis.size() != d) throw ValidationError(where + ": expected " + std::to_string(d) + " vectors");
  for (const auto& v : basis) {
    if (v.size() != d) throw ValidationError(where + ": vector length differs from d");
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      Complex ip = 0.0;
      for (std::size_t k = 0; k < d; ++k) ip += std::conj(basis[i][k]) * basis[j][k];
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(ip - target) > kOrthonormalityTol) {
        throw ValidationError(where + ": not orthonormal at vectors " + std::to_string(i) + "," +
                              std::to_string(j));
      }
    }
  }
}

inline Scenario make_explicit_scenario(std::size_t d, std::vector<Basis> alice, std::vector<Basis> bob) {
  if (d == 0) throw ValidationError("d must be positive");
  if (alice.empty() || bob.empty()) throw ValidationError("each party needs at least one basis");
  for (std::size_t m = 0; m < alice.size(); ++m) check_orthonormal(alice[m], d, "alice basis " + std::to_string(m));
  for (std::size_t m = 0; m < bob.size(); ++m) check_orthonormal(bob[m], d, "bob basis " + std::to_string(m));
  return Scenario(d, ExplicitBases{std::move(alice), std::move(bob)});
}

/// Real qubit basis rotated by theta.
inline Basis rotated_qubit_basis(double theta) {
  return {{Complex(std::cos(theta)), Complex(std::sin(theta))}, {Complex(-std::sin(theta)), Complex(std::cos(theta))}};
}

/// d = 2 with Alice at angles 0, pi/4 and Bob at pi/8, -pi/8: the settings
/// that maximize the CHSH combination.
inline Scenario make_chsh_scenario() {
  const double pi = std::numbers::pi;
  return make_explicit_scenario(2, {rotated_qubit_basis(0.0), rotated_qubit_basis(pi / 4)},
                                {rotated_qubit_basis(pi / 8), rotated_qubit_basis(-pi / 8)});
}

namespace detail {

inline std::vector<Basis> parse_bases(const nlohmann::json& arr, const char* who) {
  if (!arr.is_array()) throw ValidationError(std::string(who) + "_bases must be an array");
  std::vector<Basis> out;
  for (const auto& jb : arr) {
    Basis basis;
    for (const auto& jv : jb) {
      Vector v;
      for (const auto& pair : jv) {
        if (!pair.is_array() || pair.size() != 2) throw ValidationError("vector entries must be [re, im] pairs");
        v.emplace_back(pair[0].get<double>(), pair[1].get<double>());
      }
      basis.push_back(std::move(v));
    }
    out.push_back(std::move(basis));
  }
  return out;
}

}  // namespace detail

/// Reads {d, state: "maximally_entangled", alice_bases, bob_bases}.
inline Scenario load_explicit_scenario(const nlohmann::json& doc) {
  try {
    if (!doc.contains("d") || !doc["d"].is_number_integer()) throw ValidationError("missing integer field d");
    const auto d = doc["d"].get<long long>();
    if (d <= 0) throw ValidationError("d must be positive");
    if (doc.value("state", std::string{}) != "maximally_entangled") {
      throw ValidationError("state must be \"maximally_entangled\"");
    }
    if (!doc.contains("alice_bases") || !doc.contains("bob_bases")) throw ValidationError("missing bases");
    return make_explicit_scenario(static_cast<std::size_t>(d), detail::parse_bases(doc["alice_bases"], "alice"),
                                  detail::parse_bases(doc["bob_bases"], "bob"));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scenario document: ") + e.what());
  }
}

inline Scenario load_explicit_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario file is not valid JSON: ") + e.what());
  }
  return load_explicit_scenario(doc);
}

inline nlohmann::json to_json(const Scenario& s) {
  if (s.is_bct()) return {{"d", s.d()}, {"family", "implicit_bct"}, {"n", s.bct().n}};
  auto dump = [](const std::vector<Basis>& bases) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : bases) {
      nlohmann::json jb = nlohmann::json::array();
      for (const auto& v : b) {
        nlohmann::json jv = nlohmann::json::array();
        for (const auto& c : v) jv.push_back({c.real(), c.imag()});
        jb.push_back(jv);
      }
      arr.push_back(jb);
    }
    return arr;
  };
  return {{"d", s.d()},
          {"state", "maximally_entangled"},
          {"alice_bases", dump(s.bases().alice)},
          {"bob_bases", dump(s.bases().bob)}};
}

namespace detail {

inline void check_outcome(const Scenario& s, Outcome a) {
  if (a > s.d()) throw std::invalid_argument("outcome index exceeds d");
}

// sum_k (-1)^{z_k xor parity(c & k)} in O(d).
inline double bct_signed_sum(const BitString& z, std::size_t c) {
  const std::size_t d = z.size();
  long long sum = 0;
  for (std::size_t k = 0; k < d; ++k) sum += (z.get(k) != parity(c & k)) ? -1 : 1;
  return static_cast<double>(sum);
}

}  // namespace detail

/// <psi| (|x_a> |y_b>) for clicking outcomes a, b in 1..d.
inline Complex joint_amplitude(const Scenario& s, const Setting& x, const Setting& y, Outcome a, Outcome b) {
  s.check_alice(x);
  s.check_bob(y);
  if (a == 0 || b == 0) throw std::invalid_argument("joint_amplitude needs clicking outcomes");
  detail::check_outcome(s, a);
  detail::check_outcome(s, b);
  const std::size_t d = s.d();
  if (s.is_bct()) {
    const BitString z = std::get<BitString>(x) ^ std::get<BitString>(y);
    const std::size_t c = (a - 1) ^ (b - 1);
    return detail::bct_signed_sum(z, c) / (static_cast<double>(d) * std::sqrt(static_cast<double>(d)));
  }
  // Component product without conjugation: sum_k <k|x_a><k|y_b>.
  const auto& xa = s.bases().alice[std::get<std::size_t>(x)][a - 1];
  const auto& yb = s.bases().bob[std::get<std::size_t>(y)][b - 1];
  Complex acc = 0.0;
  for (std::size_t k = 0; k < d; ++k) acc += xa[k] * yb[k];
  return acc / std::sqrt(static_cast<double>(d));
}

/// Tr[(|x_a><x_a| (x) 1) |psi><psi|] for Alice, and the analogue for Bob.
inline double click_marginal(const Scenario& s, const Setting& setting, Outcome k, bool alice) {
  if (k == 0 || k > s.d()) throw std::invalid_argument("click_marginal needs an outcome in 1..d");
  const auto d = static_cast<double>(s.d());
  if (s.is_bct()) return 1.0 / d;
  const auto& family = alice ? s.bases().alice : s.bases().bob;
  const auto& v = family[std::get<std::size_t>(setting)][k - 1];
  double norm = 0.0;
  for (const auto& c : v) norm += std::norm(c);
  return norm / d;
}

inline double joint_prob(const Scenario& s, const Setting& x, const Setting& y, Outcome a, Outcome b,
                         Efficiency em) {
  s.check_alice(x);
  s.check_bob(y);
  detail::check_outcome(s, a);
  detail::check_outcome(s, b);
  const double eta = em.value();
  if (a == 0 && b == 0) return (1.0 - eta) * (1.0 - eta);
  if (b == 0) return eta * (1.0 - eta) * click_marginal(s, x, a, true);
  if (a == 0) return eta * (1.0 - eta) * click_marginal(s, y, b, false);
  return eta * eta * std::norm(joint_amplitude(s, x, y, a, b));
}

/// Full table for one setting pair. The implicit family uses one Walsh-Hadamard
/// transform of the sign vector of x xor y, O(d log d + d^2).
inline JointTable outcome_table(const Scenario& s, const Setting& x, const Setting& y, Efficiency em) {
  s.check_alice(x);
  s.check_bob(y);
  const std::size_t d = s.d();
  const double eta = em.value();
  JointTable t(d);
  t.at(0, 0) = (1.0 - eta) * (1.0 - eta);
  for (Outcome k = 1; k <= d; ++k) {
    t.at(k, 0) = eta * (1.0 - eta) * click_marginal(s, x, k, true);
    t.at(0, k) = eta * (1.0 - eta) * click_marginal(s, y, k, false);
  }
  if (s.is_bct()) {
    const BitString z = std::get<BitString>(x) ^ std::get<BitString>(y);
    std::vector<double> w(d);
    for (std::size_t k = 0; k < d; ++k) w[k] = z.get(k) ? -1.0 : 1.0;
    fwht(std::span<double>(w));
    const double scale = eta * eta / (static_cast<double>(d) * static_cast<double>(d) * static_cast<double>(d));
    for (Outcome a = 1; a <= d; ++a) {
      for (Outcome b = 1; b <= d; ++b) {
        const double sum = w[(a - 1) ^ (b - 1)];
        t.at(a, b) = scale * sum * sum;
      }
    }
  } else {
    for (Outcome a = 1; a <= d; ++a) {
      for (Outcome b = 1; b <= d; ++b) t.at(a, b) = eta * eta * std::norm(joint_amplitude(s, x, y, a, b));
    }
  }
  return t;
}

/// Table for the state (1-w)|psi><psi| + w * 1/d^2. Single-click marginals are
/// unchanged because both states have maximally mixed reductions.
inline JointTable noisy_outcome_table(const Scenario& s, const Setting& x, const Setting& y, Efficiency em,
                                      double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("noise weight must lie in [0, 1]");
  if (!s.is_bct()) throw std::invalid_argument("noisy tables are provided for the implicit family");
  JointTable t = outcome_table(s, x, y, em);
  const std::size_t d = s.d();
  const double eta = em.value();
  const double white = eta * eta / (static_cast<double>(d) * static_cast<double>(d));
  for (Outcome a = 1; a <= d; ++a) {
    for (Outcome b = 1; b <= d; ++b) t.at(a, b) = (1.0 - w) * t.at(a, b) + w * white;
  }
  return t;
}

}  // namespace bellsim
