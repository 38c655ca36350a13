#pragma once

// Twisted transfer operators discretized on cylinder partitions.
//
// A function is represented by its values at the cylinder markers of one
// depth. Row w = (w_1 .. w_d) of the matrix gathers the preimages
// v = (j, w_1 .. w_{d-1}) with weight |gamma_j'(x_w)|^(a + ib) e^{ik arg gamma_j'(x_w)}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hyperdyn/coding.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/moebius.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/schottky.hpp"

namespace hyperdyn {

struct TwistSpec {
  int k = 0;       ///< character of the rotation group
  double b = 0.0;  ///< imaginary part of the spectral parameter
  double a = 0.0;  ///< real part of the spectral parameter

  /// max(|k|, |b|, 1)
  double mu_norm() const { return std::max({std::abs(static_cast<double>(k)), std::abs(b), 1.0}); }
  bool untwisted() const { return k == 0 && b == 0.0; }
};

/// Geometry of the nonzero pattern, shared by every twist at one depth.
struct BranchTable {
  int depth = 0;
  std::size_t dimension = 0;
  int row_nnz = 0;
  std::vector<std::uint32_t> columns;  ///< row-major, row_nnz per row
  std::vector<int> symbols;            ///< branch symbol j of each entry
  std::vector<double> logmod;          ///< log |gamma_j'(x_w)|
  std::vector<double> arg;             ///< arg gamma_j'(x_w)
};

inline BranchTable build_branch_table(const SchottkyScheme& scheme, const CylinderSet& cylinders) {
  BranchTable t;
  t.depth = cylinders.depth();
  t.dimension = cylinders.size();
  t.row_nnz = scheme.branching();
  const std::size_t nnz = t.dimension * static_cast<std::size_t>(t.row_nnz);
  t.columns.reserve(nnz);
  t.symbols.reserve(nnz);
  t.logmod.reserve(nnz);
  t.arg.reserve(nnz);
  Word pre(static_cast<std::size_t>(t.depth));
  for (const Cylinder& w : cylinders) {
    for (int j = 0; j < scheme.symbol_count(); ++j) {
      if (!scheme.admissible(j, w.word.front())) continue;
      pre[0] = j;
      std::copy(w.word.begin(), w.word.end() - 1, pre.begin() + 1);
      const LogPolar d = derivative_log_polar(scheme.map(j), w.marker);
      t.columns.push_back(static_cast<std::uint32_t>(cylinders.index_of(pre)));
      t.symbols.push_back(j);
      t.logmod.push_back(d.logmod);
      t.arg.push_back(d.arg);
    }
  }
  return t;
}

/// Sparse complex matrix with a fixed number of entries per row.
struct TransferMatrix {
  int depth = 0;
  TwistSpec twist;
  std::size_t dimension = 0;
  int row_nnz = 0;
  std::vector<std::uint32_t> columns;
  std::vector<cplx> values;

  /// Entry (w, v); zero outside the sparsity pattern.
  cplx entry(std::size_t w, std::size_t v) const {
    const std::size_t base = w * static_cast<std::size_t>(row_nnz);
    for (int t = 0; t < row_nnz; ++t) {
      if (columns[base + static_cast<std::size_t>(t)] == v) return values[base + static_cast<std::size_t>(t)];
    }
    return {};
  }

  void apply(std::span<const cplx> x, std::span<cplx> y) const {
    const std::size_t nnz = static_cast<std::size_t>(row_nnz);
    for (std::size_t w = 0; w < dimension; ++w) {
      cplx acc{};
      for (std::size_t t = 0; t < nnz; ++t) acc += values[w * nnz + t] * x[columns[w * nnz + t]];
      y[w] = acc;
    }
  }

  void apply_transpose(std::span<const cplx> x, std::span<cplx> y) const {
    std::fill(y.begin(), y.end(), cplx{});
    const std::size_t nnz = static_cast<std::size_t>(row_nnz);
    for (std::size_t w = 0; w < dimension; ++w) {
      for (std::size_t t = 0; t < nnz; ++t) y[columns[w * nnz + t]] += values[w * nnz + t] * x[w];
    }
  }
};

inline TransferMatrix assemble(const BranchTable& table, const TwistSpec& twist) {
  TransferMatrix m;
  m.depth = table.depth;
  m.twist = twist;
  m.dimension = table.dimension;
  m.row_nnz = table.row_nnz;
  m.columns = table.columns;
  m.values.resize(table.logmod.size());
  const double kd = static_cast<double>(twist.k);
  for (std::size_t e = 0; e < table.logmod.size(); ++e) {
    const double lm = table.logmod[e];
    const double modulus = std::exp(twist.a * lm);
    const double phase = twist.b * lm + kd * table.arg[e];
    m.values[e] = phase == 0.0 ? cplx{modulus, 0.0} : modulus * cplx{std::cos(phase), std::sin(phase)};
  }
  return m;
}

inline TransferMatrix assemble(const SchottkyScheme& scheme, int depth, const TwistSpec& twist,
                               std::size_t cap = kDefaultCylinderCap) {
  const CylinderSet cyl = enumerate_cylinders(scheme, depth, cap);
  return assemble(build_branch_table(scheme, cyl), twist);
}

struct SpectralData {
  double lambda = 0.0;
  std::vector<double> right;  ///< h > 0, max-normalized
  std::vector<double> left;   ///< nu >= 0, sums to 1
  double residual = 0.0;      ///< max of the right and left residuals
  int iterations = 0;
};

namespace detail {

struct PowerResult {
  double lambda = 0.0;
  std::vector<double> vec;
  double residual = 0.0;
  int iterations = 0;
};

template <class Apply>
PowerResult power_iteration(std::size_t n, Apply&& apply, std::vector<double> start, double tol, int max_iter) {
  PowerResult r;
  std::vector<double> x = start.empty() ? std::vector<double>(n, 1.0) : std::move(start);
  std::vector<double> y(n);
  auto inf_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };
  const double x0 = inf_norm(x);
  for (double& e : x) e /= x0;
  for (int it = 1; it <= max_iter; ++it) {
    apply(x, y);
    const double lam = inf_norm(y);
    if (lam == 0.0) throw ConvergenceError("power iteration: matrix annihilated the iterate");
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(y[i] - lam * x[i]));
    res /= lam;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / lam;
    r.lambda = lam;
    r.residual = res;
    r.iterations = it;
    if (res <= tol) break;
  }
  // Residual of the returned pair, ||A x - lambda x|| / ||x||.
  apply(x, y);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(y[i] - r.lambda * x[i]));
  r.residual = res / inf_norm(x);
  r.vec = std::move(x);
  return r;
}

}  // namespace detail

/// Perron data of a nonnegative (untwisted) matrix by power iteration from the
/// all-ones vector; the left vector comes from the transpose.
inline SpectralData perron(const TransferMatrix& m, double tol = 1e-12, int max_iter = 100000,
                           std::vector<double> start = {}) {
  if (!m.twist.untwisted()) throw EvaluationError("perron: requires an untwisted (k = 0, b = 0) matrix");
  const std::size_t n = m.dimension;
  const std::size_t nnz = static_cast<std::size_t>(m.row_nnz);
  std::vector<double> vals(m.values.size());
  for (std::size_t e = 0; e < vals.size(); ++e) vals[e] = m.values[e].real();

  auto right = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t w = 0; w < n; ++w) {
      double acc = 0.0;
      for (std::size_t t = 0; t < nnz; ++t) acc += vals[w * nnz + t] * x[m.columns[w * nnz + t]];
      y[w] = acc;
    }
  };
  auto left = [&](const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t t = 0; t < nnz; ++t) y[m.columns[w * nnz + t]] += vals[w * nnz + t] * x[w];
    }
  };

  const auto r = detail::power_iteration(n, right, std::move(start), tol, max_iter);
  const auto l = detail::power_iteration(n, left, {}, tol, max_iter);
  const double guard = std::max(1e-10, 100.0 * tol);
  if (r.residual > guard || l.residual > guard) {
    throw ConvergenceError("perron: power iteration did not converge (residual " +
                           std::to_string(std::max(r.residual, l.residual)) + ")");
  }
  SpectralData s;
  s.lambda = r.lambda;
  s.right = r.vec;
  s.left = l.vec;
  double total = 0.0;
  for (double v : s.left) total += v;
  for (double& v : s.left) v /= total;
  s.residual = std::max(r.residual, l.residual);
  s.iterations = std::max(r.iterations, l.iterations);
  return s;
}

/// Leading eigenvalue of the untwisted operator at real parameter s.
inline double leading_eigenvalue(const BranchTable& table, double s, std::vector<double>* warm = nullptr) {
  const TransferMatrix m = assemble(table, TwistSpec{0, 0.0, s});
  SpectralData d = perron(m, 1e-12, 100000, warm ? *warm : std::vector<double>{});
  if (warm) *warm = d.right;
  return d.lambda;
}

/// Root of lambda(s) = 1 on [0, 2] by bisection; 0 for rank-one schemes.
inline double solve_delta(const SchottkyScheme& scheme, const BranchTable& table, double tol) {
  if (scheme.rank() < 2) return 0.0;
  double lo = 0.0;
  double hi = 2.0;
  std::vector<double> warm;
  if (!(leading_eigenvalue(table, lo, &warm) > 1.0) || !(leading_eigenvalue(table, hi, &warm) < 1.0)) {
    throw ConvergenceError("solve_delta: lambda(s) = 1 is not bracketed by [0, 2]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (leading_eigenvalue(table, mid, &warm) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double solve_delta(const SchottkyScheme& scheme, int depth, double tol,
                          std::size_t cap = kDefaultCylinderCap) {
  if (scheme.rank() < 2) return 0.0;
  const CylinderSet cyl = enumerate_cylinders(scheme, depth, cap);
  return solve_delta(scheme, build_branch_table(scheme, cyl), tol);
}

/// entry(w, v) <- entry(w, v) h(v) / (lambda h(w)).
inline TransferMatrix normalize(const TransferMatrix& m, const SpectralData& spectral) {
  TransferMatrix out = m;
  const std::size_t nnz = static_cast<std::size_t>(m.row_nnz);
  for (std::size_t w = 0; w < m.dimension; ++w) {
    const double scale = 1.0 / (spectral.lambda * spectral.right[w]);
    for (std::size_t t = 0; t < nnz; ++t) {
      const std::size_t e = w * nnz + t;
      out.values[e] *= spectral.right[m.columns[e]] * scale;
    }
  }
  return out;
}

/// Stationary weights of the normalized operator: nu_w h_w / sum(nu h).
inline std::vector<double> normalized_weights(const SpectralData& spectral) {
  std::vector<double> w(spectral.right.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = spectral.left[i] * spectral.right[i];
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

/// Everything derived from a scheme at one depth with the base point a = delta.
struct OperatorContext {
  SchottkyScheme scheme;
  CylinderSet cylinders;
  BranchTable branches;
  double delta = 0.0;
  SpectralData base;             ///< untwisted Perron data at a = delta
  std::vector<double> weights;   ///< normalized stationary weights
};

inline OperatorContext make_context(const SchottkyScheme& scheme, int depth, double delta_tol = 1e-10,
                                    std::size_t cap = kDefaultCylinderCap) {
  OperatorContext ctx{scheme, enumerate_cylinders(scheme, depth, cap), {}, 0.0, {}, {}};
  ctx.branches = build_branch_table(scheme, ctx.cylinders);
  ctx.delta = solve_delta(scheme, ctx.branches, delta_tol);
  ctx.base = perron(assemble(ctx.branches, TwistSpec{0, 0.0, ctx.delta}));
  ctx.weights = normalized_weights(ctx.base);
  return ctx;
}

/// Twisted operator normalized by the Perron data at the base point.
inline TransferMatrix normalized_operator(const OperatorContext& ctx, const TwistSpec& twist) {
  return normalize(assemble(ctx.branches, twist), ctx.base);
}

// ---------------------------------------------------------------------------
// Iterate norms

struct ProbeBasis {
  std::vector<std::vector<double>> vectors;  ///< unit vectors in L^2(weights)
  std::vector<bool> nonnegative;
  std::vector<std::string> names;
};

inline constexpr int kBumpProbes = 4;
inline constexpr int kRandomProbes = 8;

/// Constant vector, coordinate bumps at evenly spaced indices, and seeded
/// Gaussian vectors, each scaled to unit weighted L^2 norm.
inline ProbeBasis make_probe_basis(std::span<const double> weights, std::uint64_t seed = 0) {
  const std::size_t n = weights.size();
  ProbeBasis basis;
  auto push = [&](std::vector<double> v, bool nonneg, std::string name) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += weights[i] * v[i] * v[i];
    norm = std::sqrt(norm);
    if (norm == 0.0) return;
    for (double& e : v) e /= norm;
    basis.vectors.push_back(std::move(v));
    basis.nonnegative.push_back(nonneg);
    basis.names.push_back(std::move(name));
  };
  push(std::vector<double>(n, 1.0), true, "constant");
  std::vector<std::size_t> seen;
  for (int b = 0; b < kBumpProbes; ++b) {
    const std::size_t idx = static_cast<std::size_t>(b) * n / kBumpProbes;
    if (std::find(seen.begin(), seen.end(), idx) != seen.end()) continue;
    seen.push_back(idx);
    std::vector<double> v(n, 0.0);
    v[idx] = 1.0;
    push(std::move(v), true, "bump" + std::to_string(idx));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < kRandomProbes; ++r) {
    std::vector<double> v(n);
    for (double& e : v) e = normal(rng);
    push(std::move(v), false, "random" + std::to_string(r));
  }
  return basis;
}

struct IterateReport {
  std::vector<double> m;                        ///< max over probes, j = 0..n
  std::vector<std::vector<double>> log_norms;   ///< per probe, j = 0..n
  std::vector<bool> nonnegative;
  double rho_est = 0.0;

  double probe_norm(std::size_t probe, std::size_t j) const { return std::exp(log_norms[probe][j]); }
};

/// Weighted L^2 norms of the iterates M^j p for every probe p, j = 0..n, and
/// rho_est = (m_n / m_{n/2})^(2/n).
inline IterateReport iterate_norm(const TransferMatrix& m, std::span<const double> weights, int n,
                                  const ProbeBasis& basis) {
  if (n < 2 || n > 10000) throw EvaluationError("iterate_norm: n must lie in [2, 10000]");
  const std::size_t dim = m.dimension;
  const std::size_t probes = basis.vectors.size();
  const std::size_t nnz = static_cast<std::size_t>(m.row_nnz);

  // Block layout [row][probe] with split real/imaginary parts.
  std::vector<double> xr(dim * probes), xi(dim * probes, 0.0), yr(dim * probes), yi(dim * probes);
  for (std::size_t p = 0; p < probes; ++p) {
    for (std::size_t w = 0; w < dim; ++w) xr[w * probes + p] = basis.vectors[p][w];
  }
  std::vector<double> vr(m.values.size()), vi(m.values.size());
  for (std::size_t e = 0; e < m.values.size(); ++e) {
    vr[e] = m.values[e].real();
    vi[e] = m.values[e].imag();
  }

  IterateReport rep;
  rep.nonnegative = basis.nonnegative;
  rep.log_norms.assign(probes, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
  std::vector<double> scale_log(probes, 0.0);
  std::vector<double> sq(probes);

  for (int j = 1; j <= n; ++j) {
    for (std::size_t w = 0; w < dim; ++w) {
      double* yrw = &yr[w * probes];
      double* yiw = &yi[w * probes];
      std::fill(yrw, yrw + probes, 0.0);
      std::fill(yiw, yiw + probes, 0.0);
      for (std::size_t t = 0; t < nnz; ++t) {
        const std::size_t e = w * nnz + t;
        const double ar = vr[e];
        const double ai = vi[e];
        const double* xrc = &xr[m.columns[e] * probes];
        const double* xic = &xi[m.columns[e] * probes];
        for (std::size_t p = 0; p < probes; ++p) {
          yrw[p] += ar * xrc[p] - ai * xic[p];
          yiw[p] += ar * xic[p] + ai * xrc[p];
        }
      }
    }
    std::fill(sq.begin(), sq.end(), 0.0);
    for (std::size_t w = 0; w < dim; ++w) {
      const double wt = weights[w];
      for (std::size_t p = 0; p < probes; ++p) {
        const double re = yr[w * probes + p];
        const double im = yi[w * probes + p];
        sq[p] += wt * (re * re + im * im);
      }
    }
    for (std::size_t p = 0; p < probes; ++p) {
      const double norm = std::sqrt(sq[p]);
      if (norm == 0.0 || !std::isfinite(scale_log[p])) {
        rep.log_norms[p][static_cast<std::size_t>(j)] = -std::numeric_limits<double>::infinity();
        scale_log[p] = -std::numeric_limits<double>::infinity();
        continue;
      }
      scale_log[p] += std::log(norm);
      rep.log_norms[p][static_cast<std::size_t>(j)] = scale_log[p];
      const double inv = 1.0 / norm;
      for (std::size_t w = 0; w < dim; ++w) {
        yr[w * probes + p] *= inv;
        yi[w * probes + p] *= inv;
      }
    }
    std::swap(xr, yr);
    std::swap(xi, yi);
  }

  rep.m.assign(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> log_m(static_cast<std::size_t>(n) + 1, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j <= static_cast<std::size_t>(n); ++j) {
    for (std::size_t p = 0; p < probes; ++p) log_m[j] = std::max(log_m[j], rep.log_norms[p][j]);
    rep.m[j] = std::exp(log_m[j]);
  }
  const double top = log_m[static_cast<std::size_t>(n)];
  const double half = log_m[static_cast<std::size_t>(n / 2)];
  const int span = n - n / 2;
  rep.rho_est = std::isfinite(top) ? std::exp((top - half) / span) : 0.0;
  return rep;
}

inline IterateReport iterate_norm(const TransferMatrix& m, std::span<const double> weights, int n,
                                  std::uint64_t seed = 0) {
  return iterate_norm(m, weights, n, make_probe_basis(weights, seed));
}

// ---------------------------------------------------------------------------
// Grid scans

struct ScanRow {
  double b = 0.0;
  int k = 0;
  double a = 0.0;
  int depth = 0;
  double rho_est = 0.0;
  bool flagged = false;           ///< trivial twist with |b| <= 1
  double m_half = 0.0;
  double m_final = 0.0;
  double domination_excess = 0.0; ///< max over nonnegative probes and j of m_j(twisted) - m_j(untwisted)
};

inline bool excluded_by_theory(int k, double b) { return k == 0 && std::abs(b) <= 1.0; }

/// One row per (b, k) at real part a, sorted by (k, b). Nonnegative probes are
/// compared against the untwisted operator at the same a.
inline std::vector<ScanRow> scan_grid(const OperatorContext& ctx, double a, std::span<const double> b_values,
                                      std::span<const int> k_values, int iters, unsigned workers = 1,
                                      std::uint64_t seed = 0) {
  std::vector<std::pair<int, double>> cells;
  for (int k : k_values) {
    for (double b : b_values) cells.emplace_back(k, b);
  }
  std::sort(cells.begin(), cells.end());
  const ProbeBasis basis = make_probe_basis(ctx.weights, seed);
  const IterateReport reference = iterate_norm(normalized_operator(ctx, TwistSpec{0, 0.0, a}), ctx.weights, iters, basis);

  std::vector<ScanRow> rows(cells.size());
  parallel_for(cells.size(), workers, [&](std::size_t i) {
    const auto [k, b] = cells[i];
    const TransferMatrix op = normalized_operator(ctx, TwistSpec{k, b, a});
    const IterateReport rep = iterate_norm(op, ctx.weights, iters, basis);
    ScanRow row;
    row.b = b;
    row.k = k;
    row.a = a;
    row.depth = ctx.cylinders.depth();
    row.rho_est = rep.rho_est;
    row.flagged = excluded_by_theory(k, b);
    row.m_half = rep.m[static_cast<std::size_t>(iters / 2)];
    row.m_final = rep.m[static_cast<std::size_t>(iters)];
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < basis.vectors.size(); ++p) {
      if (!basis.nonnegative[p]) continue;
      for (std::size_t j = 0; j <= static_cast<std::size_t>(iters); ++j) {
        excess = std::max(excess, rep.probe_norm(p, j) - reference.probe_norm(p, j));
      }
    }
    row.domination_excess = excess;
    rows[i] = row;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Lasota-Yorke check

enum class LyProbe { constant, linear };

struct LyReport {
  std::vector<int> m_values;
  std::vector<double> a0;  ///< smallest constant making the inequality hold, per m
  double spread = 0.0;     ///< max(a0) / min(a0)
  std::size_t pairs = 0;
};

namespace detail {

// Smooth extension of the collocated eigenvector: one application of the
// operator at the base point to the piecewise-constant right vector.
inline double extended_eigenfunction(const OperatorContext& ctx, cplx y, std::span<const int> address) {
  const SchottkyScheme& s = ctx.scheme;
  const int depth = ctx.cylinders.depth();
  Word pre(static_cast<std::size_t>(depth));
  double sum = 0.0;
  for (int j = 0; j < s.symbol_count(); ++j) {
    if (!s.admissible(j, address[0])) continue;
    pre[0] = j;
    for (int t = 1; t < depth; ++t) pre[static_cast<std::size_t>(t)] = address[static_cast<std::size_t>(t - 1)];
    const double lm = derivative_log_polar(s.map(j), y).logmod;
    sum += std::exp(ctx.delta * lm) * ctx.base.right[ctx.cylinders.index_of(pre)];
  }
  return sum / ctx.base.lambda;
}

struct PointwiseIterates {
  cplx twisted;         ///< normalized twisted operator^m applied to h
  double modulus_h = 0.0;  ///< normalized real operator^m applied to |h|
  double unit = 0.0;       ///< normalized real operator^m applied to 1
};

inline PointwiseIterates pointwise_iterates(const OperatorContext& ctx, const TwistSpec& twist, std::size_t cyl,
                                            int m, LyProbe probe, cplx probe_center) {
  const Cylinder& c = ctx.cylinders[cyl];
  const int depth = ctx.cylinders.depth();
  const double h_here = extended_eigenfunction(ctx, c.marker, c.word);
  Word address(static_cast<std::size_t>(m + depth));
  std::copy(c.word.begin(), c.word.end(), address.begin() + m);
  PointwiseIterates out{};
  const double kd = static_cast<double>(twist.k);
  for_each_branch(ctx.scheme, c.marker, c.word.front(), m,
                  [&](std::span<const int> word, cplx image, double logmod, double arg) {
                    std::copy(word.begin(), word.end(), address.begin());
                    const double h_there = extended_eigenfunction(ctx, image, address);
                    const double weight = std::exp(twist.a * logmod) * h_there;
                    const cplx value = probe == LyProbe::constant ? cplx{1.0} : image - probe_center;
                    const double phase = twist.b * logmod + kd * arg;
                    out.twisted += weight * cplx{std::cos(phase), std::sin(phase)} * value;
                    out.modulus_h += weight * std::abs(value);
                    out.unit += weight;
                  });
  const double norm = 1.0 / (std::pow(ctx.base.lambda, m) * h_here);
  out.twisted *= norm;
  out.modulus_h *= norm;
  out.unit *= norm;
  return out;
}

}  // namespace detail

/// Measures the smallest A_0 with
///   |grad L^m h| <= A_0 [ ||mu_b|| L_a^m |h| + (B / kappa^m) L_a^m H ]
/// where gradients are first differences between sibling markers (same parent
/// cylinder), the operators are evaluated pointwise over all inverse branches,
/// and (B, H) = (1, 1) for the linear probe, (0, 1) for the constant probe.
inline LyReport ly_check(const OperatorContext& ctx, const TwistSpec& twist, std::span<const int> m_values,
                         LyProbe probe = LyProbe::linear, std::size_t pair_limit = 64, unsigned workers = 1) {
  const auto& cyl = ctx.cylinders;
  if (cyl.depth() < 2) throw EvaluationError("ly_check: depth must be >= 2");
  const std::size_t family = static_cast<std::size_t>(ctx.scheme.branching());
  // Siblings are consecutive in lexicographic order within blocks of 2r - 1.
  std::vector<std::pair<std::size_t, std::size_t>> all_pairs;
  for (std::size_t start = 0; start + family <= cyl.size(); start += family) {
    for (std::size_t t = 0; t + 1 < family; ++t) all_pairs.emplace_back(start + t, start + t + 1);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const std::size_t take = std::min(pair_limit, all_pairs.size());
  for (std::size_t i = 0; i < take; ++i) pairs.push_back(all_pairs[i * all_pairs.size() / take]);

  const double kappa = 1.0 / ctx.scheme.max_one_step_derivative();
  const double gradient_bound = probe == LyProbe::constant ? 0.0 : 1.0;
  const cplx probe_center{0.0, 0.0};

  LyReport rep;
  rep.pairs = pairs.size();
  for (int m : m_values) {
    std::vector<double> ratios(pairs.size(), 0.0);
    parallel_for(pairs.size(), workers, [&](std::size_t i) {
      const auto [p, q] = pairs[i];
      const auto left = detail::pointwise_iterates(ctx, twist, p, m, probe, probe_center);
      const auto right = detail::pointwise_iterates(ctx, twist, q, m, probe, probe_center);
      const double dist = std::abs(cyl[p].marker - cyl[q].marker);
      const double lhs = std::abs(left.twisted - right.twisted) / dist;
      const double bracket = twist.mu_norm() * 0.5 * (left.modulus_h + right.modulus_h) +
                             gradient_bound / std::pow(kappa, m) * 0.5 * (left.unit + right.unit);
      ratios[i] = bracket > 0.0 ? lhs / bracket : 0.0;
    });
    rep.m_values.push_back(m);
    rep.a0.push_back(ratios.empty() ? 0.0 : *std::max_element(ratios.begin(), ratios.end()));
  }
  const auto [lo, hi] = std::minmax_element(rep.a0.begin(), rep.a0.end());
  rep.spread = (lo != rep.a0.end() && *lo > 0.0) ? *hi / *lo : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace hyperdyn
