#pragma once

// Schottky schemes: paired disks, generator maps, the symbol alphabet with its
// inverse involution, and the admissibility (transition) matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hyperdyn/errors.hpp"
#include "hyperdyn/moebius.hpp"

namespace hyperdyn {

struct GeneratorSpec {
  Disk source;
  Disk target;
  double twist = 0.0;  ///< radians
};

inline constexpr double kMinDiskGap = 1e-9;
inline constexpr double kMaxOneStepDerivative = 1.0 - 1e-6;
inline constexpr int kContainmentSamples = 64;

/// Symbols are 0-based: j < r is generator j, j + r its inverse. D_j is the
/// disk the map for symbol j lands in.
class SchottkyScheme {
 public:
  int rank() const { return rank_; }
  int symbol_count() const { return 2 * rank_; }
  int bar(int j) const { return (j + rank_) % (2 * rank_); }
  bool admissible(int j, int next) const { return next != bar(j); }
  /// Number of admissible successors of every symbol (2r - 1).
  int branching() const { return 2 * rank_ - 1; }

  const MobiusMap& map(int j) const { return maps_[static_cast<std::size_t>(j)]; }
  const Disk& disk(int j) const { return disks_[static_cast<std::size_t>(j)]; }
  const std::vector<GeneratorSpec>& generators() const { return specs_; }

  /// Transition matrix entry Tr[j][next].
  int transition(int j, int next) const { return admissible(j, next) ? 1 : 0; }

  /// Exact sup of |gamma_j'| over D_next for an admissible pair.
  double derivative_bound(int j, int next) const {
    return bounds_[static_cast<std::size_t>(j * symbol_count() + next)];
  }
  /// Exact inf of |gamma_j'| over D_next for an admissible pair.
  double derivative_floor(int j, int next) const {
    return floors_[static_cast<std::size_t>(j * symbol_count() + next)];
  }
  /// Largest one-step derivative over all admissible pairs (1 / kappa exactly).
  double max_one_step_derivative() const { return max_bound_; }
  double min_one_step_derivative() const { return min_floor_; }

  /// Smallest gap between two of the 2r closed disks.
  double min_gap() const { return min_gap_; }

  bool fuchsian_degenerate() const { return fuchsian_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  friend SchottkyScheme build_scheme(const std::vector<GeneratorSpec>& specs);

 private:
  int rank_ = 0;
  std::vector<GeneratorSpec> specs_;
  std::vector<MobiusMap> maps_;
  std::vector<Disk> disks_;
  std::vector<double> bounds_;
  std::vector<double> floors_;
  double max_bound_ = 0.0;
  double min_floor_ = 0.0;
  double min_gap_ = 0.0;
  bool fuchsian_ = false;
  std::vector<std::string> warnings_;
};

namespace detail {

inline std::string disk_path(int symbol, int rank) {
  std::ostringstream os;
  if (symbol < rank) {
    os << "generators[" << symbol << "].target";
  } else {
    os << "generators[" << symbol - rank << "].source";
  }
  return os.str();
}

// All centers on one line L and every generator preserving the circle L,
// i.e. twist == 2 * angle(L) mod pi.
inline bool is_fuchsian_degenerate(const std::vector<GeneratorSpec>& specs) {
  std::vector<cplx> centers;
  for (const auto& s : specs) {
    centers.push_back(s.source.center);
    centers.push_back(s.target.center);
  }
  const cplx base = centers.front();
  cplx dir{};
  for (const cplx& c : centers) {
    if (std::abs(c - base) > std::abs(dir)) dir = c - base;
  }
  if (std::abs(dir) == 0.0) return true;
  const cplx unit = dir / std::abs(dir);
  const double scale = std::abs(dir);
  for (const cplx& c : centers) {
    const double off = std::imag((c - base) / unit);
    if (std::abs(off) > 1e-12 * std::max(1.0, scale)) return false;
  }
  const double line_angle = std::arg(unit);
  for (const auto& s : specs) {
    const double r = std::remainder(s.twist - 2.0 * line_angle, kPi);
    if (std::abs(r) > 1e-12) return false;
  }
  return true;
}

}  // namespace detail

/// Validates the geometry and assembles the scheme. Throws GeometryError on
/// overlapping or tangent disks and on generators that are not strict
/// one-step contractions on their admissible domains.
inline SchottkyScheme build_scheme(const std::vector<GeneratorSpec>& specs) {
  if (specs.empty()) throw GeometryError("generators: at least one generator is required");
  SchottkyScheme s;
  s.rank_ = static_cast<int>(specs.size());
  const int r = s.rank_;
  const int n = 2 * r;

  for (int g = 0; g < r; ++g) {
    const auto& spec = specs[static_cast<std::size_t>(g)];
    for (const auto* which : {&spec.source, &spec.target}) {
      const char* name = which == &spec.source ? "source" : "target";
      if (!(which->radius > 0.0) || !std::isfinite(which->radius)) {
        throw GeometryError("generators[" + std::to_string(g) + "]." + name + ".radius: must be a positive finite number");
      }
      if (!std::isfinite(which->center.real()) || !std::isfinite(which->center.imag())) {
        throw GeometryError("generators[" + std::to_string(g) + "]." + name + ".center: must be finite");
      }
    }
    if (!std::isfinite(spec.twist)) {
      throw GeometryError("generators[" + std::to_string(g) + "].twist: must be finite");
    }
  }

  s.specs_ = specs;
  for (auto& spec : s.specs_) spec.twist = fold_angle(spec.twist);

  s.maps_.resize(static_cast<std::size_t>(n));
  s.disks_.resize(static_cast<std::size_t>(n));
  for (int g = 0; g < r; ++g) {
    const auto& spec = s.specs_[static_cast<std::size_t>(g)];
    const MobiusMap m = pairing_map(spec.source, spec.target, spec.twist);
    s.maps_[static_cast<std::size_t>(g)] = m;
    s.maps_[static_cast<std::size_t>(g + r)] = m.inverse();
    s.disks_[static_cast<std::size_t>(g)] = spec.target;
    s.disks_[static_cast<std::size_t>(g + r)] = spec.source;
  }

  s.min_gap_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double gap = s.disk(i).gap(s.disk(j));
      s.min_gap_ = std::min(s.min_gap_, gap);
      if (gap < kMinDiskGap) {
        std::ostringstream os;
        os << detail::disk_path(i, r) << " and " << detail::disk_path(j, r)
           << ": disks overlap or are tangent (gap " << gap << ", required >= " << kMinDiskGap << ")";
        throw GeometryError(os.str());
      }
    }
  }

  // The pairing maps send the boundary circle of D_bar(j) onto that of D_j and
  // its exterior inside; check on samples, including every admissible D_next.
  for (int j = 0; j < n; ++j) {
    const Disk& home = s.disk(j);
    const Disk& excluded = s.disk(s.bar(j));
    for (int t = 0; t < kContainmentSamples; ++t) {
      const double ang = kTwoPi * t / kContainmentSamples;
      const cplx img = apply_finite(s.map(j), excluded.boundary_point(ang));
      if (!home.contains(img, 1e-9 * std::max(1.0, home.radius))) {
        throw GeometryError(detail::disk_path(j, r) + ": generator image leaves its target disk");
      }
    }
    for (int next = 0; next < n; ++next) {
      if (!s.admissible(j, next)) continue;
      const Disk& dom = s.disk(next);
      for (int t = 0; t < kContainmentSamples; ++t) {
        const double ang = kTwoPi * t / kContainmentSamples;
        const cplx img = apply_finite(s.map(j), dom.boundary_point(ang));
        if (!home.contains(img, 1e-9)) {
          throw GeometryError(detail::disk_path(next, r) + ": image under symbol " + std::to_string(j) +
                              " is not contained in " + detail::disk_path(j, r));
        }
      }
    }
  }

  s.bounds_.assign(static_cast<std::size_t>(n * n), 0.0);
  s.floors_.assign(static_cast<std::size_t>(n * n), 0.0);
  s.max_bound_ = 0.0;
  s.min_floor_ = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    for (int next = 0; next < n; ++next) {
      if (!s.admissible(j, next)) continue;
      const double hi = max_derivative_on(s.map(j), s.disk(next));
      const double lo = min_derivative_on(s.map(j), s.disk(next));
      s.bounds_[static_cast<std::size_t>(j * n + next)] = hi;
      s.floors_[static_cast<std::size_t>(j * n + next)] = lo;
      s.max_bound_ = std::max(s.max_bound_, hi);
      s.min_floor_ = std::min(s.min_floor_, lo);
      if (hi > kMaxOneStepDerivative) {
        std::ostringstream os;
        os << "generators[" << (j % r) << "]: " << (j < r ? "generator" : "inverse")
           << " is not a strict one-step contraction on " << detail::disk_path(next, r)
           << " (max |derivative| = " << hi << ", required <= " << kMaxOneStepDerivative << ")";
        throw GeometryError(os.str());
      }
    }
  }

  s.fuchsian_ = detail::is_fuchsian_degenerate(s.specs_);
  if (s.fuchsian_) {
    s.warnings_.emplace_back(
        "configuration is Fuchsian-degenerate (collinear centers, twists preserve the line): "
        "the holonomy twist is trivial and non-local integrability fails");
  }
  return s;
}

struct ContractionBounds {
  double c0 = 1.0;
  double kappa = 1.0;   ///< 1 / max sampled one-step |branch'|
  double kappa1 = 1.0;  ///< 1 / min sampled one-step |branch'|
};

namespace detail {

// Nested sample sequences: the first n points of a longer run are exactly the
// points of a shorter one, so adding samples can only widen the extremes.
inline cplx boundary_sample(const Disk& d, int t) {
  constexpr double golden = 2.399963229728653;  // pi (3 - sqrt 5)
  return d.boundary_point(golden * t);
}

inline cplx interior_sample(const Disk& d, int t) {
  constexpr double golden = 2.399963229728653;
  const double frac = std::fmod((t + 0.5) * 0.6180339887498949, 1.0);
  return d.center + std::polar(d.radius * std::sqrt(frac), golden * t);
}

}  // namespace detail

/// Empirical contraction constants: extremes of |gamma_j'| over boundary and
/// interior samples of every admissible domain disk.
inline ContractionBounds estimate_contraction(const SchottkyScheme& scheme, int samples_per_domain) {
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  const int n = scheme.symbol_count();
  const int count = std::max(1, samples_per_domain);
  for (int j = 0; j < n; ++j) {
    for (int next = 0; next < n; ++next) {
      if (!scheme.admissible(j, next)) continue;
      const Disk& dom = scheme.disk(next);
      auto visit = [&](cplx z) {
        const double m = std::abs(derivative(scheme.map(j), z));
        hi = std::max(hi, m);
        lo = std::min(lo, m);
      };
      visit(dom.center);
      for (int t = 0; t < count; ++t) {
        visit(detail::boundary_sample(dom, t));
        visit(detail::interior_sample(dom, t));
      }
    }
  }
  return {1.0, 1.0 / hi, 1.0 / lo};
}

/// Symbol letters: a, b, ... for generators and A, B, ... for inverses.
inline char symbol_letter(int j, int rank) {
  return j < rank ? static_cast<char>('a' + j) : static_cast<char>('A' + (j - rank));
}

}  // namespace hyperdyn
