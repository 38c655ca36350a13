#pragma once

// Complex Moebius geometry on the Riemann sphere: normalized SL(2,C)
// representatives, disks, conformal derivatives and loxodromic invariants.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "hyperdyn/errors.hpp"

namespace hyperdyn {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Folds an angle into (-pi, pi].
inline double fold_angle(double x) {
  double r = std::remainder(x, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

/// A point of the extended complex plane. Infinity is a tag, not a sentinel.
class ProjectivePoint {
 public:
  constexpr ProjectivePoint() = default;
  constexpr ProjectivePoint(cplx z) : z_(z) {}  // NOLINT(google-explicit-constructor)
  static constexpr ProjectivePoint infinity() {
    ProjectivePoint p;
    p.infinite_ = true;
    return p;
  }

  constexpr bool is_infinite() const { return infinite_; }
  /// Finite value; meaningless when is_infinite().
  constexpr cplx value() const { return z_; }

  friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.z_ == b.z_;
  }

 private:
  cplx z_{0.0, 0.0};
  bool infinite_ = false;
};

struct Disk {
  cplx center;
  double radius = 1.0;

  bool contains(cplx z, double slack = 0.0) const {
    return std::abs(z - center) <= radius + slack;
  }
  /// Signed distance between the closed disks (negative when they overlap).
  double gap(const Disk& other) const {
    return std::abs(center - other.center) - radius - other.radius;
  }
  cplx boundary_point(double angle) const {
    return center + std::polar(radius, angle);
  }
};

/// z -> (a z + b) / (c z + d) with ad - bc = 1. The overall sign is fixed so
/// that the first nonzero entry (row-major) has argument in (-pi/2, pi/2].
class MobiusMap {
 public:
  MobiusMap() = default;

  static MobiusMap identity() { return MobiusMap(); }

  static MobiusMap from_entries(cplx a, cplx b, cplx c, cplx d) {
    const cplx det = a * d - b * c;
    if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det))) {
      throw GeometryError("degenerate Moebius matrix (zero determinant)");
    }
    const cplx s = std::sqrt(det);
    MobiusMap m;
    m.m_ = {a / s, b / s, c / s, d / s};
    m.fix_sign();
    return m;
  }

  /// Entries already known to have determinant 1 (products of normalized
  /// maps); only the sign is fixed, since recomputing ad - bc cancels badly
  /// once the entries are large.
  static MobiusMap from_unimodular(cplx a, cplx b, cplx c, cplx d) {
    MobiusMap m;
    m.m_ = {a, b, c, d};
    m.fix_sign();
    return m;
  }

  cplx a() const { return m_[0]; }
  cplx b() const { return m_[1]; }
  cplx c() const { return m_[2]; }
  cplx d() const { return m_[3]; }
  cplx trace() const { return m_[0] + m_[3]; }
  cplx determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  MobiusMap inverse() const { return from_unimodular(m_[3], -m_[1], -m_[2], m_[0]); }

  /// Pole of the map (the point sent to infinity); infinity when c == 0.
  ProjectivePoint pole() const {
    if (m_[2] == cplx{}) return ProjectivePoint::infinity();
    return ProjectivePoint(-m_[3] / m_[2]);
  }

 private:
  void fix_sign() {
    for (const cplx& e : m_) {
      if (e != cplx{}) {
        const double arg = std::arg(e);
        if (!(arg > -kPi / 2 && arg <= kPi / 2)) {
          for (cplx& x : m_) x = -x;
        }
        return;
      }
    }
  }

  std::array<cplx, 4> m_{cplx{1.0}, cplx{}, cplx{}, cplx{1.0}};
};

/// Matrix product f * g, i.e. the map z -> f(g(z)).
inline MobiusMap compose(const MobiusMap& f, const MobiusMap& g) {
  return MobiusMap::from_unimodular(f.a() * g.a() + f.b() * g.c(), f.a() * g.b() + f.b() * g.d(),
                                    f.c() * g.a() + f.d() * g.c(), f.c() * g.b() + f.d() * g.d());
}

inline ProjectivePoint apply(const MobiusMap& g, const ProjectivePoint& p) {
  if (p.is_infinite()) {
    if (g.c() == cplx{}) return ProjectivePoint::infinity();
    return ProjectivePoint(g.a() / g.c());
  }
  const cplx z = p.value();
  const cplx den = g.c() * z + g.d();
  if (den == cplx{}) return ProjectivePoint::infinity();
  return ProjectivePoint((g.a() * z + g.b()) / den);
}

/// Finite-only fast path; the caller guarantees z is not the pole.
inline cplx apply_finite(const MobiusMap& g, cplx z) {
  return (g.a() * z + g.b()) / (g.c() * z + g.d());
}

struct LogPolar {
  double logmod = 0.0;  ///< log |g'(z)|
  double arg = 0.0;     ///< arg g'(z) in (-pi, pi]
};

/// g'(z) = 1 / (cz + d)^2 in log-polar form.
inline LogPolar derivative_log_polar(const MobiusMap& g, cplx z) {
  const cplx w = g.c() * z + g.d();
  if (w == cplx{}) throw EvaluationError("derivative evaluated at the pole of the map");
  return {-2.0 * std::log(std::abs(w)), fold_angle(-2.0 * std::arg(w))};
}

inline cplx derivative(const MobiusMap& g, cplx z) {
  const cplx w = g.c() * z + g.d();
  if (w == cplx{}) throw EvaluationError("derivative evaluated at the pole of the map");
  return 1.0 / (w * w);
}

/// Largest |g'| over a closed disk that does not contain the pole.
inline double max_derivative_on(const MobiusMap& g, const Disk& disk) {
  if (g.c() == cplx{}) return 1.0 / std::norm(g.d());
  const cplx pole = -g.d() / g.c();
  const double dist = std::abs(disk.center - pole) - disk.radius;
  if (dist <= 0.0) throw EvaluationError("disk contains the pole of the map");
  return 1.0 / (std::norm(g.c()) * dist * dist);
}

/// Smallest |g'| over a closed disk that does not contain the pole.
inline double min_derivative_on(const MobiusMap& g, const Disk& disk) {
  if (g.c() == cplx{}) return 1.0 / std::norm(g.d());
  const cplx pole = -g.d() / g.c();
  const double dist = std::abs(disk.center - pole) + disk.radius;
  return 1.0 / (std::norm(g.c()) * dist * dist);
}

/// The map z -> c' + e^{i twist} r r' / (z - c); it sends the exterior of
/// `src` onto the interior of `tgt`.
inline MobiusMap pairing_map(const Disk& src, const Disk& tgt, double twist) {
  const cplx k = std::polar(src.radius * tgt.radius, twist);
  return MobiusMap::from_entries(tgt.center, k - src.center * tgt.center, cplx{1.0}, -src.center);
}

struct LoxodromicData {
  double length = 0.0;    ///< translation length 2 log|lambda|
  double holonomy = 0.0;  ///< rotation angle 2 arg(lambda), folded to (-pi, pi]
  cplx eigenvalue{1.0};   ///< lambda with |lambda| > 1
};

/// Invariants of a loxodromic element from its trace lambda + 1/lambda.
inline LoxodromicData loxodromic_from_trace(cplx trace) {
  const cplx disc = std::sqrt(trace * trace - 4.0);
  cplx lambda = 0.5 * (trace + disc);
  const cplx other = 0.5 * (trace - disc);
  if (std::abs(other) > std::abs(lambda)) lambda = other;
  if (!(std::abs(lambda) > 1.0 + 1e-9)) {
    throw GeometryError("element is not loxodromic (|lambda| <= 1 + 1e-9)");
  }
  return {2.0 * std::log(std::abs(lambda)), fold_angle(2.0 * std::arg(lambda)), lambda};
}

inline LoxodromicData loxodromic_data(const MobiusMap& g) { return loxodromic_from_trace(g.trace()); }

}  // namespace hyperdyn
