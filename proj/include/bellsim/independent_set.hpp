#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bellsim/errors.hpp"

namespace bellsim {

/// Fixed-size bitset with word-level access.
class DynBitset {
 public:
  DynBitset() = default;
  explicit DynBitset(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  /// Lowest set index, or size() if empty.
  std::size_t first() const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
    return n_;
  }

  void and_with(const DynBitset& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
  }
  void and_not(const DynBitset& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~o.words_[w];
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Undirected conflict graph on vertices 0..n-1.
class ConflictGraph {
 public:
  explicit ConflictGraph(std::size_t n) : adj_(n, DynBitset(n)) {}

  std::size_t size() const noexcept { return adj_.size(); }
  void add_edge(std::size_t u, std::size_t v) {
    adj_[u].set(v);
    adj_[v].set(u);
  }
  bool adjacent(std::size_t u, std::size_t v) const { return adj_[u].test(v); }
  const DynBitset& neighbours(std::size_t v) const { return adj_[v]; }
  std::size_t degree(std::size_t v) const { return adj_[v].count(); }

 private:
  std::vector<DynBitset> adj_;
};

struct IndependentSetResult {
  std::vector<std::size_t> members;  // original vertex ids, ascending
  std::uint64_t nodes = 0;
};

struct IndependentSetOptions {
  std::uint64_t node_budget = 50'000'000;
  std::vector<std::size_t> incumbent;     // known independent set used as a starting bound
  std::vector<std::size_t> forced;        // vertices that must be in the solution
};

/// Exact maximum independent set by bitset branch and bound: the problem is
/// solved as maximum clique in the complement graph with a greedy colouring
/// bound. Vertices are ordered by descending conflict degree so the colouring
/// sees low-conflict vertices last and branches on them first.
/// Throws BudgetExhausted (carrying the incumbent) when the node budget runs out.
class MaxIndependentSet {
 public:
  MaxIndependentSet(const ConflictGraph& g, IndependentSetOptions opts) : g_(g), opts_(std::move(opts)) {
    const std::size_t n = g.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<std::size_t> deg(n);
    for (std::size_t v = 0; v < n; ++v) deg[v] = g.degree(v);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return deg[a] > deg[b]; });
    // Complement adjacency in the permuted numbering.
    compat_.assign(n, DynBitset(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && !g.adjacent(order_[i], order_[j])) compat_[i].set(j);
      }
    }
  }

  IndependentSetResult solve() {
    const std::size_t n = g_.size();
    std::vector<std::size_t> inverse(n);
    for (std::size_t i = 0; i < n; ++i) inverse[order_[i]] = i;

    best_.clear();
    for (auto v : opts_.incumbent) best_.push_back(inverse.at(v));

    DynBitset candidates(n);
    for (std::size_t i = 0; i < n; ++i) candidates.set(i);
    current_.clear();
    for (auto v : opts_.forced) {
      const std::size_t i = inverse.at(v);
      if (!candidates.test(i)) throw std::invalid_argument("forced vertices conflict");
      current_.push_back(i);
      candidates.and_with(compat_[i]);
    }
    if (current_.size() > best_.size()) best_ = current_;
    nodes_ = 0;
    if (!candidates.none()) expand(candidates);

    IndependentSetResult out;
    for (auto i : best_) out.members.push_back(order_[i]);
    std::sort(out.members.begin(), out.members.end());
    out.nodes = nodes_;
    return out;
  }

 private:
  void expand(DynBitset candidates) {
    if (++nodes_ > opts_.node_budget) {
      std::vector<std::uint64_t> best;
      for (auto i : best_) best.push_back(order_[i]);
      std::sort(best.begin(), best.end());
      throw BudgetExhausted("independent-set search exhausted its node budget", std::move(best));
    }
    // Greedy colouring of the candidate set in the compatibility graph; each
    // colour class is pairwise conflicting, so at most one member per class fits.
    std::vector<std::size_t> verts;
    std::vector<std::size_t> colours;
    verts.reserve(candidates.count());
    DynBitset uncoloured = candidates;
    std::size_t colour = 0;
    while (!uncoloured.none()) {
      ++colour;
      DynBitset avail = uncoloured;
      while (!avail.none()) {
        const std::size_t v = avail.first();
        uncoloured.reset(v);
        avail.reset(v);
        avail.and_not(compat_[v]);
        verts.push_back(v);
        colours.push_back(colour);
      }
    }
    for (std::size_t idx = verts.size(); idx-- > 0;) {
      if (current_.size() + colours[idx] <= best_.size()) return;
      const std::size_t v = verts[idx];
      current_.push_back(v);
      DynBitset next = candidates;
      next.and_with(compat_[v]);
      if (next.none()) {
        if (current_.size() > best_.size()) best_ = current_;
      } else {
        expand(std::move(next));
      }
      current_.pop_back();
      candidates.reset(v);
    }
  }

  const ConflictGraph& g_;
  IndependentSetOptions opts_;
  std::vector<std::size_t> order_;
  std::vector<DynBitset> compat_;
  std::vector<std::size_t> current_;
  std::vector<std::size_t> best_;
  std::uint64_t nodes_ = 0;
};

}  // namespace bellsim
