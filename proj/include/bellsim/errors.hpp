#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bellsim {

// Input that parses but violates a documented invariant (non-orthonormal
// basis, unnormalized table, dimension mismatch).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured size cap was exceeded before any work started.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A search ran out of its node budget. Carries the best solution found so far
// so callers can still report a lower bound.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(const std::string& what, std::vector<std::uint64_t> best)
      : std::runtime_error(what), best_(std::move(best)) {}

  const std::vector<std::uint64_t>& best_so_far() const noexcept { return best_; }

 private:
  std::vector<std::uint64_t> best_;
};

// Numerical failure inside the LP solver.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace bellsim
