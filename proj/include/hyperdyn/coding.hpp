#pragma once

// Symbolic dynamics on a Schottky scheme: admissible words, cylinders with
// marker points, inverse branches, and the roof / holonomy cocycles.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hyperdyn/errors.hpp"
#include "hyperdyn/moebius.hpp"
#include "hyperdyn/schottky.hpp"

namespace hyperdyn {

using Word = std::vector<int>;

inline constexpr std::size_t kDefaultCylinderCap = 5'000'000;

inline bool is_admissible(const SchottkyScheme& scheme, std::span<const int> word) {
  for (int s : word) {
    if (s < 0 || s >= scheme.symbol_count()) return false;
  }
  for (std::size_t i = 1; i < word.size(); ++i) {
    if (!scheme.admissible(word[i - 1], word[i])) return false;
  }
  return true;
}

inline std::string word_to_string(const SchottkyScheme& scheme, std::span<const int> word) {
  std::string out;
  out.reserve(word.size());
  for (int s : word) out.push_back(symbol_letter(s, scheme.rank()));
  return out;
}

inline Word word_from_string(const SchottkyScheme& scheme, const std::string& text) {
  Word w;
  for (char ch : text) {
    int s = -1;
    if (ch >= 'a' && ch < 'a' + scheme.rank()) s = ch - 'a';
    if (ch >= 'A' && ch < 'A' + scheme.rank()) s = scheme.rank() + (ch - 'A');
    if (s < 0) throw EvaluationError(std::string("unknown symbol letter '") + ch + "'");
    w.push_back(s);
  }
  return w;
}

/// Number of admissible words of the given length: 2r (2r-1)^(depth-1).
inline std::uint64_t admissible_count(const SchottkyScheme& scheme, int depth) {
  if (depth <= 0) return 1;
  std::uint64_t n = static_cast<std::uint64_t>(scheme.symbol_count());
  for (int i = 1; i < depth; ++i) {
    n *= static_cast<std::uint64_t>(scheme.branching());
    if (n > (std::uint64_t{1} << 62)) break;
  }
  return n;
}

struct CocycleValue {
  double tau = 0.0;    ///< roof: -log |gamma_j'(x)|
  double theta = 0.0;  ///< holonomy: -arg gamma_j'(x), folded to (-pi, pi]
};

/// Roof and holonomy of the branch y = gamma_j(x). x must avoid D_bar(j).
inline CocycleValue one_step_cocycle(const SchottkyScheme& scheme, int j, cplx x) {
  if (scheme.disk(scheme.bar(j)).contains(x)) {
    throw EvaluationError("one-step cocycle: point lies in the excluded disk of symbol " + std::to_string(j));
  }
  const LogPolar d = derivative_log_polar(scheme.map(j), x);
  return {-d.logmod, fold_angle(-d.arg)};
}

/// gamma_{w_1} o ... o gamma_{w_n} applied to x (innermost map last symbol).
inline cplx branch_apply(const SchottkyScheme& scheme, std::span<const int> word, cplx x) {
  if (!is_admissible(scheme, word)) throw EvaluationError("branch_apply: word is not admissible");
  for (std::size_t i = word.size(); i-- > 0;) {
    const int j = word[i];
    if (scheme.disk(scheme.bar(j)).contains(x)) {
      throw EvaluationError("branch_apply: point is not in the domain of symbol " + std::to_string(j));
    }
    x = apply_finite(scheme.map(j), x);
  }
  return x;
}

/// Birkhoff sums of (tau, theta) along the inverse branch of `word` at x.
/// Equals (-log |V'(x)|, -arg V'(x)) for the composed branch V.
inline CocycleValue birkhoff(const SchottkyScheme& scheme, std::span<const int> word, cplx x) {
  if (!is_admissible(scheme, word)) throw EvaluationError("birkhoff: word is not admissible");
  CocycleValue sum;
  for (std::size_t i = word.size(); i-- > 0;) {
    const int j = word[i];
    const CocycleValue step = one_step_cocycle(scheme, j, x);
    sum.tau += step.tau;
    sum.theta += step.theta;
    x = apply_finite(scheme.map(j), x);
  }
  sum.theta = fold_angle(sum.theta);
  return sum;
}

struct Cylinder {
  Word word;
  cplx marker;          ///< image of the center of D_{last} under the prefix branch
  cplx tail_marker;     ///< marker of the shifted word (w_2 .. w_d); equals marker at depth 1
  double radius_bound;  ///< every point of the cylinder lies within this distance of marker
};

/// All admissible cylinders of one depth in lexicographic word order.
class CylinderSet {
 public:
  CylinderSet() = default;
  CylinderSet(const SchottkyScheme& scheme, int depth, std::vector<Cylinder> cylinders)
      : depth_(depth), symbols_(scheme.symbol_count()), rank_(scheme.rank()),
        cylinders_(std::move(cylinders)) {}

  int depth() const { return depth_; }
  std::size_t size() const { return cylinders_.size(); }
  const Cylinder& operator[](std::size_t i) const { return cylinders_[i]; }
  const std::vector<Cylinder>& cylinders() const { return cylinders_; }
  auto begin() const { return cylinders_.begin(); }
  auto end() const { return cylinders_.end(); }

  /// Lexicographic rank of an admissible word of this depth.
  std::size_t index_of(std::span<const int> word) const {
    std::size_t idx = static_cast<std::size_t>(word[0]);
    const std::size_t branching = static_cast<std::size_t>(symbols_ - 1);
    for (std::size_t i = 1; i < word.size(); ++i) {
      const int bar = (word[i - 1] + rank_) % symbols_;
      const int rank = word[i] - (word[i] > bar ? 1 : 0);
      idx = idx * branching + static_cast<std::size_t>(rank);
    }
    return idx;
  }

  double max_radius() const {
    double m = 0.0;
    for (const auto& c : cylinders_) m = std::max(m, c.radius_bound);
    return m;
  }

 private:
  int depth_ = 0;
  int symbols_ = 0;
  int rank_ = 0;
  std::vector<Cylinder> cylinders_;
};

/// Enumerates the 2r (2r-1)^(depth-1) cylinders. The marker of (j_1..j_d) is
/// gamma_{j_1} o ... o gamma_{j_{d-1}} (center D_{j_d}); the radius bound is
/// diam(D_{j_d}) times the per-step derivative sups.
inline CylinderSet enumerate_cylinders(const SchottkyScheme& scheme, int depth,
                                       std::size_t cap = kDefaultCylinderCap) {
  if (depth < 1) throw EvaluationError("enumerate_cylinders: depth must be >= 1");
  const std::uint64_t total = admissible_count(scheme, depth);
  if (total > cap) {
    throw BudgetError("enumerate_cylinders: depth " + std::to_string(depth) + " needs " + std::to_string(total) +
                      " cylinders, cap is " + std::to_string(cap));
  }
  const int n = scheme.symbol_count();
  std::vector<Cylinder> level;
  level.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const Disk& d = scheme.disk(j);
    level.push_back({Word{j}, d.center, d.center, 2.0 * d.radius});
  }
  for (int t = 2; t <= depth; ++t) {
    std::vector<Cylinder> next;
    next.reserve(level.size() * static_cast<std::size_t>(scheme.branching()));
    for (int j = 0; j < n; ++j) {
      for (const Cylinder& tail : level) {
        if (!scheme.admissible(j, tail.word.front())) continue;
        Cylinder c;
        c.word.reserve(static_cast<std::size_t>(t));
        c.word.push_back(j);
        c.word.insert(c.word.end(), tail.word.begin(), tail.word.end());
        c.marker = apply_finite(scheme.map(j), tail.marker);
        c.tail_marker = tail.marker;
        c.radius_bound = scheme.derivative_bound(j, tail.word.front()) * tail.radius_bound;
        next.push_back(std::move(c));
      }
    }
    level = std::move(next);
  }
  return CylinderSet(scheme, depth, std::move(level));
}

/// Roof and holonomy attached to a cylinder for the suspension: the one-step
/// cocycle of its first symbol at the marker of the shifted word.
inline CocycleValue cylinder_cocycle(const SchottkyScheme& scheme, const Cylinder& c) {
  if (c.word.size() == 1) {
    // No shifted marker: use the center of any admissible successor disk.
    const int j = c.word.front();
    int next = 0;
    while (!scheme.admissible(j, next)) ++next;
    return one_step_cocycle(scheme, j, scheme.disk(next).center);
  }
  return one_step_cocycle(scheme, c.word.front(), c.tail_marker);
}

/// Visits every inverse branch V = gamma_{i_1} o ... o gamma_{i_m} defined at
/// x, where `first` is the first symbol of the cylinder containing x. The
/// callback receives (branch word, V(x), log|V'(x)|, arg V'(x) unfolded).
template <class Fn>
void for_each_branch(const SchottkyScheme& scheme, cplx x, int first, int length, Fn&& fn) {
  Word word(static_cast<std::size_t>(length));
  auto recurse = [&](auto&& self, int level, cplx point, int lead, double logmod, double arg) -> void {
    if (level == 0) {
      fn(std::span<const int>(word), point, logmod, arg);
      return;
    }
    for (int j = 0; j < scheme.symbol_count(); ++j) {
      if (!scheme.admissible(j, lead)) continue;
      const LogPolar d = derivative_log_polar(scheme.map(j), point);
      word[static_cast<std::size_t>(level - 1)] = j;
      self(self, level - 1, apply_finite(scheme.map(j), point), j, logmod + d.logmod, arg + d.arg);
    }
  };
  recurse(recurse, length, x, first, 0.0, 0.0);
}

}  // namespace hyperdyn
