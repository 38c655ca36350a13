#pragma once

// Primitive closed geodesics as cyclic words, their lengths and holonomies,
// and the counting / character sums compared against li(e^{delta T}).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hyperdyn/coding.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/moebius.hpp"
#include "hyperdyn/schottky.hpp"

namespace hyperdyn {

struct GeodesicRecord {
  Word cyclic_word;
  double length = 0.0;
  double holonomy = 0.0;
  bool primitive = true;
};

enum class Orientation { oriented, unoriented };

inline bool cyclically_admissible(const SchottkyScheme& scheme, std::span<const int> word) {
  if (word.empty() || !is_admissible(scheme, word)) return false;
  return scheme.admissible(word.back(), word.front());
}

/// Lexicographically least rotation.
inline Word canonical_rotation(std::span<const int> word) {
  const std::size_t n = word.size();
  std::size_t best = 0;
  for (std::size_t s = 1; s < n; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const int a = word[(s + i) % n];
      const int b = word[(best + i) % n];
      if (a != b) {
        if (a < b) best = s;
        break;
      }
    }
  }
  Word out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = word[(best + i) % n];
  return out;
}

/// Smallest p dividing n with word[i] == word[i + p] for all i.
inline std::size_t minimal_period(std::span<const int> word) {
  const std::size_t n = word.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = word[i] == word[i - p];
    if (ok) return p;
  }
  return n;
}

/// Word of the inverse element: reversed, each symbol replaced by its bar.
inline Word inverse_word(const SchottkyScheme& scheme, std::span<const int> word) {
  Word out(word.rbegin(), word.rend());
  for (int& s : out) s = scheme.bar(s);
  return out;
}

inline MobiusMap word_element(const SchottkyScheme& scheme, std::span<const int> word) {
  MobiusMap m = MobiusMap::identity();
  for (int s : word) m = compose(m, scheme.map(s));
  return m;
}

inline GeodesicRecord make_record(const SchottkyScheme& scheme, std::span<const int> word) {
  if (!cyclically_admissible(scheme, word)) throw EvaluationError("geodesic word is not cyclically admissible");
  const LoxodromicData lox = loxodromic_data(word_element(scheme, word));
  return {canonical_rotation(word), lox.length, lox.holonomy, minimal_period(word) == word.size()};
}

/// Lengths of cyclic words of length n are at least n log kappa, so every
/// class shorter than (L + 1) log kappa has word length <= L.
inline double completeness_horizon(const SchottkyScheme& scheme, int max_word_length) {
  return (max_word_length + 1) * -std::log(scheme.max_one_step_derivative());
}

inline constexpr std::uint64_t kDefaultWordBudget = 50'000'000;

/// One record per conjugacy class of word length <= max_word_length, sorted
/// by length (ties by word). Unoriented mode keeps one of each inverse pair.
inline std::vector<GeodesicRecord> enumerate_classes(const SchottkyScheme& scheme, int max_word_length,
                                                     Orientation orientation = Orientation::oriented,
                                                     std::uint64_t budget = kDefaultWordBudget) {
  if (max_word_length < 1) throw EvaluationError("enumerate_classes: max_word_length must be >= 1");
  const double per_level = scheme.branching();
  const double estimate = scheme.symbol_count() * std::pow(per_level, max_word_length - 1);
  if (estimate > static_cast<double>(budget)) {
    throw BudgetError("enumerate_classes: about " + std::to_string(estimate) + " words at length " +
                      std::to_string(max_word_length) + ", budget is " + std::to_string(budget));
  }
  std::vector<GeodesicRecord> out;
  const int n = scheme.symbol_count();
  Word word;
  std::vector<MobiusMap> prefix;  // prefix[i] = element of word[0..i]

  auto visit_leaf = [&]() {
    if (!scheme.admissible(word.back(), word.front())) return;
    // Canonical means the word is its own least rotation.
    const Word canon = canonical_rotation(word);
    if (canon != word) return;
    if (orientation == Orientation::unoriented) {
      const Word inv = canonical_rotation(inverse_word(scheme, word));
      if (inv < canon) return;
    }
    const LoxodromicData lox = loxodromic_data(prefix.back());
    out.push_back({word, lox.length, lox.holonomy, minimal_period(word) == word.size()});
  };

  auto recurse = [&](auto&& self) -> void {
    visit_leaf();
    if (static_cast<int>(word.size()) == max_word_length) return;
    for (int s = word.front(); s < n; ++s) {
      if (!scheme.admissible(word.back(), s)) continue;
      word.push_back(s);
      prefix.push_back(compose(prefix.back(), scheme.map(s)));
      self(self);
      word.pop_back();
      prefix.pop_back();
    }
  };

  for (int first = 0; first < n; ++first) {
    word.assign(1, first);
    prefix.assign(1, scheme.map(first));
    recurse(recurse);
  }
  std::sort(out.begin(), out.end(), [](const GeodesicRecord& a, const GeodesicRecord& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.cyclic_word < b.cyclic_word;
  });
  return out;
}

/// Number of primitive records with length < T.
inline std::size_t count(std::span<const GeodesicRecord> records, double T) {
  std::size_t n = 0;
  for (const auto& r : records) {
    if (r.primitive && r.length < T) ++n;
  }
  return n;
}

/// As above; appends a warning when T exceeds the completeness horizon.
inline std::size_t count(std::span<const GeodesicRecord> records, double T, double horizon,
                         std::vector<std::string>& warnings) {
  if (T > horizon) {
    warnings.push_back("T = " + std::to_string(T) + " exceeds the completeness horizon " + std::to_string(horizon) +
                       "; counts are lower bounds");
  }
  return count(records, T);
}

/// Offset logarithmic integral: integral from 2 to x of dt / log t.
inline double li(double x) {
  if (!(x >= 2.0) || !std::isfinite(x)) throw EvaluationError("li: argument must be a finite number >= 2");
  if (x == 2.0) return 0.0;
  // t = e^u turns the integrand into e^u / u, smooth on [log 2, log x].
  auto integrand = [](double u) { return std::exp(u) / u; };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, std::log(2.0), std::log(x), 30, 1e-13, &error);
  return value;
}

struct EquidistReport {
  std::vector<double> T;
  std::vector<std::size_t> counts;
  std::vector<double> li_values;
  int k_max = 0;
  std::vector<std::vector<std::complex<double>>> sums;  ///< sums[t][k], k = 0..k_max

  double count_ratio(std::size_t t) const { return static_cast<double>(counts[t]) / li_values[t]; }
  double character_ratio(std::size_t t, int k) const {
    return counts[t] == 0 ? 0.0 : std::abs(sums[t][static_cast<std::size_t>(k)]) / static_cast<double>(counts[t]);
  }
};

/// S_k(T) = sum over primitive classes with length < T of e^{ik phi}.
inline EquidistReport equidist_sums(std::span<const GeodesicRecord> records, double delta, std::span<const double> T_grid,
                                    int k_max, double horizon) {
  EquidistReport rep;
  rep.k_max = k_max;
  for (double T : T_grid) {
    if (T > horizon) {
      throw ConfigError("equidist: T = " + std::to_string(T) + " exceeds the completeness horizon " +
                        std::to_string(horizon));
    }
    std::vector<std::complex<double>> s(static_cast<std::size_t>(k_max) + 1);
    std::size_t n = 0;
    for (const auto& r : records) {
      if (!r.primitive || !(r.length < T)) continue;
      ++n;
      for (int k = 0; k <= k_max; ++k) {
        s[static_cast<std::size_t>(k)] += k == 0 ? cplx{1.0} : std::polar(1.0, k * r.holonomy);
      }
    }
    s[0] = static_cast<double>(n);
    rep.T.push_back(T);
    rep.counts.push_back(n);
    rep.li_values.push_back(delta * T > std::log(2.0) ? li(std::exp(delta * T)) : 0.0);
    rep.sums.push_back(std::move(s));
  }
  return rep;
}

/// Evenly spaced grid of `points` values ending at `top`, starting at
/// `fraction * top`.
inline std::vector<double> top_grid(double top, double fraction, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    out.push_back(top * (fraction + (1.0 - fraction) * i / std::max(1, points - 1)));
  }
  return out;
}

}  // namespace hyperdyn
