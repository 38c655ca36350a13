#pragma once

// Shared fixtures and independent oracles for the test programs.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "hyperdyn/hyperdyn.hpp"

namespace testing {

using hyperdyn::cplx;

inline std::string config_path(const std::string& name) { return std::string(HYPERDYN_CONFIG_DIR) + "/" + name + ".json"; }

inline hyperdyn::SchottkyScheme load_scheme(const std::string& name) {
  return hyperdyn::build_scheme(hyperdyn::load_config(config_path(name)).generators);
}

inline hyperdyn::GeneratorSpec pairing(cplx a, double ra, cplx b, double rb, double twist) {
  return {{a, ra}, {b, rb}, twist};
}

/// Two well separated pairs with unequal radii and twists.
inline hyperdyn::SchottkyScheme generic_scheme() {
  return hyperdyn::build_scheme({pairing({-2.1, 0.2}, 0.45, {1.9, -0.1}, 0.6, 1.13),
                                 pairing({0.15, -2.2}, 0.5, {-0.2, 2.05}, 0.4, -0.41)});
}

/// Box-counting dimension of a planar point cloud: least-squares slope of
/// log N(eps) against log(1/eps) over eps = 10^{-lo} .. 10^{-hi}, averaged
/// over three grid offsets.
inline double box_dimension(const std::vector<cplx>& points, double lo, double hi, int per_decade = 4) {
  std::vector<double> xs, ys;
  const double offsets[3] = {0.0, 0.3183, 0.7071};
  for (int i = 0; i <= static_cast<int>((hi - lo) * per_decade); ++i) {
    const double eps = std::pow(10.0, -(lo + static_cast<double>(i) / per_decade));
    double mean_log = 0.0;
    for (double off : offsets) {
      std::unordered_set<std::uint64_t> cells;
      for (const cplx& p : points) {
        const auto gx = static_cast<std::int64_t>(std::floor(p.real() / eps + off));
        const auto gy = static_cast<std::int64_t>(std::floor(p.imag() / eps + off));
        cells.insert(static_cast<std::uint64_t>(gx) * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(gy));
      }
      mean_log += std::log(static_cast<double>(cells.size())) / 3.0;
    }
    xs.push_back(-std::log(eps));
    ys.push_back(mean_log);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  return sxy / sxx;
}

/// Exact image of a disk under a map whose pole lies outside it: the image
/// center is the image of the reflection of the pole across the boundary.
inline hyperdyn::Disk image_disk(const hyperdyn::MobiusMap& m, const hyperdyn::Disk& d) {
  const cplx pole = -m.d() / m.c();
  const cplx star = d.center + d.radius * d.radius / std::conj(pole - d.center);
  const cplx center = hyperdyn::apply_finite(m, star);
  return {center, std::abs(hyperdyn::apply_finite(m, d.center + d.radius) - center)};
}

inline cplx random_point(std::mt19937_64& rng, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng)};
}

}  // namespace testing
