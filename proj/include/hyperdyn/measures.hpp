#pragma once

// Cylinder-level equilibrium measure, ball-doubling ratios and the
// non-concentration certificate on the limit set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "hyperdyn/coding.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/transfer.hpp"

namespace hyperdyn {

struct CylinderMeasure {
  int depth = 0;
  std::vector<double> weights;
};

/// Weights proportional to nu_w h_w.
inline CylinderMeasure equilibrium_measure(const SpectralData& spectral, int depth) {
  return {depth, normalized_weights(spectral)};
}

inline CylinderMeasure equilibrium_measure(const OperatorContext& ctx) {
  return {ctx.cylinders.depth(), ctx.weights};
}

/// Masses of the depth-(d-1) parents. Children of w are the words w x, which
/// are contiguous in lexicographic order.
inline CylinderMeasure marginal(const CylinderMeasure& m, const SchottkyScheme& scheme) {
  if (m.depth < 2) throw EvaluationError("marginal: depth must be >= 2");
  const std::size_t family = static_cast<std::size_t>(scheme.branching());
  CylinderMeasure out{m.depth - 1, std::vector<double>(m.weights.size() / family, 0.0)};
  for (std::size_t i = 0; i < m.weights.size(); ++i) out.weights[i / family] += m.weights[i];
  return out;
}

/// max_v |sum_w weights_w P(w, v) - weights_v| for a row-stochastic P.
inline double stationarity_residual(const CylinderMeasure& m, const TransferMatrix& normalized) {
  std::vector<cplx> x(m.weights.begin(), m.weights.end());
  std::vector<cplx> y(x.size());
  normalized.apply_transpose(x, y);
  double res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) res = std::max(res, std::abs(y[i] - x[i]));
  return res;
}

inline double roof_average(const CylinderMeasure& m, std::span<const double> tau) {
  double sum = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) sum += m.weights[i] * tau[i];
  return sum;
}

/// sum_w weight_w tau_w with tau from the cylinder cocycle.
inline double roof_average(const CylinderMeasure& m, const SchottkyScheme& scheme, const CylinderSet& cylinders) {
  std::vector<double> tau(cylinders.size());
  for (std::size_t i = 0; i < cylinders.size(); ++i) tau[i] = cylinder_cocycle(scheme, cylinders[i]).tau;
  return roof_average(m, tau);
}

// ---------------------------------------------------------------------------
// Doubling

/// Mass of every cylinder whose bounding disk meets the closed ball B(x, eps).
inline double ball_mass(const CylinderMeasure& m, const CylinderSet& cylinders, cplx x, double eps) {
  double mass = 0.0;
  for (std::size_t i = 0; i < cylinders.size(); ++i) {
    if (std::abs(cylinders[i].marker - x) <= eps + cylinders[i].radius_bound) mass += m.weights[i];
  }
  return mass;
}

struct DoublingRow {
  std::size_t center = 0;  ///< cylinder index of the sampled center
  double scale = 0.0;
  double mass = 0.0;       ///< mass of B(x, eps)
  double mass_double = 0.0;  ///< mass of B(x, 2 eps)
};

struct DoublingReport {
  std::vector<DoublingRow> rows;     ///< skipped pairs excluded
  std::vector<double> scales;
  std::vector<double> sup_by_scale;  ///< max ratio per scale, NaN when every center was skipped
  double sup_ratio = 1.0;
  std::size_t skipped = 0;
};

/// Centers are cylinder indices (their markers are used); scales are dyadic,
/// eps_i = largest_scale / 2^i.
inline DoublingReport doubling_ratio(const CylinderMeasure& m, const CylinderSet& cylinders,
                                     std::span<const std::size_t> centers, std::span<const double> scales,
                                     unsigned workers = 1) {
  DoublingReport rep;
  rep.scales.assign(scales.begin(), scales.end());
  const std::size_t ns = scales.size();
  std::vector<DoublingRow> grid(centers.size() * ns);
  parallel_for(centers.size(), workers, [&](std::size_t c) {
    const cplx x = cylinders[centers[c]].marker;
    for (std::size_t s = 0; s < ns; ++s) {
      DoublingRow row;
      row.center = centers[c];
      row.scale = scales[s];
      row.mass = ball_mass(m, cylinders, x, scales[s]);
      row.mass_double = ball_mass(m, cylinders, x, 2.0 * scales[s]);
      grid[c * ns + s] = row;
    }
  });
  rep.sup_by_scale.assign(ns, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const DoublingRow& row = grid[i];
    if (row.mass <= 0.0) {
      ++rep.skipped;
      continue;
    }
    const double ratio = row.mass_double / row.mass;
    double& slot = rep.sup_by_scale[i % ns];
    slot = std::isnan(slot) ? ratio : std::max(slot, ratio);
    rep.sup_ratio = std::max(rep.sup_ratio, ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

/// Evenly spaced center indices.
inline std::vector<std::size_t> spread_centers(std::size_t cylinder_count, std::size_t samples) {
  std::vector<std::size_t> out;
  const std::size_t n = std::min(samples, cylinder_count);
  for (std::size_t i = 0; i < n; ++i) out.push_back(i * cylinder_count / n);
  return out;
}

inline std::vector<double> dyadic_scales(double largest, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::ldexp(largest, -i));
  return out;
}

// ---------------------------------------------------------------------------
// Non-concentration

struct NcpWorstCase {
  cplx point;
  double direction = 0.0;  ///< angle of the unit vector w
  double scale = 0.0;
};

struct NcpReport {
  double delta_star = 1.0;
  NcpWorstCase worst_case;
  std::size_t evaluations = 0;
};

namespace detail {

// Unit normals of the edges of conv{+v, -v}. For a centrally symmetric set the
// support function w -> max |<v, w>| is minimized at one of these.
inline std::vector<cplx> symmetric_hull_normals(std::span<const cplx> local) {
  std::vector<cplx> pts;
  pts.reserve(2 * local.size());
  for (const cplx& v : local) {
    if (v == cplx{}) continue;
    pts.push_back(v);
    pts.push_back(-v);
  }
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) return {};
  auto cross = [](cplx o, cplx a, cplx b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
  };
  std::vector<cplx> hull(2 * pts.size());
  std::size_t k = 0;
  for (const cplx& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  std::vector<cplx> normals;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const cplx edge = hull[(i + 1) % hull.size()] - hull[i];
    if (std::abs(edge) > 0.0) normals.push_back(cplx{-edge.imag(), edge.real()} / std::abs(edge));
  }
  return normals;
}

}  // namespace detail

/// For sampled x, directions w and scales eps, the largest |<y - x, w>| / eps
/// over cloud points y in B(x, eps); delta_star is the minimum of that over
/// every (x, w, eps). Besides the uniform grid, w runs over the hull-edge
/// normals of the local cloud, so the minimum over w is exact.
inline NcpReport ncp_on_cloud(std::span<const cplx> cloud, std::span<const cplx> centers,
                              std::span<const double> epsilons, int directions) {
  NcpReport rep;
  std::vector<cplx> units;
  for (int d = 0; d < directions; ++d) units.push_back(std::polar(1.0, kTwoPi * d / directions));
  std::vector<cplx> local;
  for (const cplx& x : centers) {
    for (double eps : epsilons) {
      local.clear();
      for (const cplx& y : cloud) {
        if (std::abs(y - x) <= eps) local.push_back(y - x);
      }
      std::vector<cplx> dirs = units;
      const std::vector<cplx> normals = detail::symmetric_hull_normals(local);
      dirs.insert(dirs.end(), normals.begin(), normals.end());
      for (const cplx& w : dirs) {
        double best = 0.0;
        for (const cplx& v : local) best = std::max(best, std::abs(v.real() * w.real() + v.imag() * w.imag()));
        const double value = std::min(1.0, best / eps);
        ++rep.evaluations;
        if (value < rep.delta_star) {
          rep.delta_star = value;
          double angle = std::arg(w);
          if (angle < 0.0) angle += kTwoPi;
          rep.worst_case = {x, angle, eps};
        }
      }
    }
  }
  return rep;
}

inline constexpr int kNcpDirections = 64;

/// Centers are drawn from the measure with a seeded generator; the cloud is
/// the set of all markers at the measure's depth.
inline NcpReport ncp_certificate(const CylinderMeasure& m, const CylinderSet& cylinders, std::size_t samples,
                                 std::span<const double> epsilons, int directions = kNcpDirections,
                                 std::uint64_t seed = 0) {
  std::vector<cplx> cloud;
  cloud.reserve(cylinders.size());
  for (const Cylinder& c : cylinders) cloud.push_back(c.marker);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
  std::vector<cplx> centers;
  for (std::size_t i = 0; i < samples; ++i) centers.push_back(cloud[pick(rng)]);
  return ncp_on_cloud(cloud, centers, epsilons, directions);
}

}  // namespace hyperdyn
