#pragma once

// Monte Carlo on the suspension flow, the Laplace-transform / operator-series
// identity, Brin-Pesin (NLI) certificates and Fourier-mode decay.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "hyperdyn/coding.hpp"
#include "hyperdyn/errors.hpp"
#include "hyperdyn/moebius.hpp"
#include "hyperdyn/parallel.hpp"
#include "hyperdyn/schottky.hpp"
#include "hyperdyn/transfer.hpp"

namespace hyperdyn {

// ---------------------------------------------------------------------------
// Random streams

/// Generator for stream `stream` of a run seeded with `seed`. Streams are
/// attached to sample indices, never to workers.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Suspension model

struct Successor {
  std::size_t target = 0;
  double probability = 0.0;
};

/// The symbolic chain of the normalized untwisted operator run forward in
/// time, with roof and holonomy attached to each cylinder.
struct SuspensionModel {
  const OperatorContext* ctx = nullptr;
  std::vector<double> tau;
  std::vector<double> theta;
  std::vector<std::vector<Successor>> successors;
  std::vector<double> start_cdf;  ///< length-biased stationary law nu_hat tau
  double roof_mean = 0.0;         ///< sum nu_hat tau

  std::size_t size() const { return tau.size(); }
  int first_symbol(std::size_t cylinder) const { return ctx->cylinders[cylinder].word.front(); }
};

/// Forward transition v -> w has probability nu_hat(w) P(w, v) / nu_hat(v),
/// where P is the normalized untwisted operator; it preserves nu_hat.
inline SuspensionModel make_suspension(const OperatorContext& ctx) {
  SuspensionModel m;
  m.ctx = &ctx;
  const std::size_t n = ctx.cylinders.size();
  m.tau.resize(n);
  m.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CocycleValue c = cylinder_cocycle(ctx.scheme, ctx.cylinders[i]);
    m.tau[i] = c.tau;
    m.theta[i] = c.theta;
  }
  const TransferMatrix p = normalized_operator(ctx, TwistSpec{0, 0.0, ctx.delta});
  m.successors.assign(n, {});
  const std::size_t nnz = static_cast<std::size_t>(p.row_nnz);
  for (std::size_t w = 0; w < n; ++w) {
    for (std::size_t t = 0; t < nnz; ++t) {
      const std::size_t v = p.columns[w * nnz + t];
      m.successors[v].push_back({w, ctx.weights[w] * p.values[w * nnz + t].real() / ctx.weights[v]});
    }
  }
  for (auto& row : m.successors) {
    double total = 0.0;
    for (const auto& s : row) total += s.probability;
    for (auto& s : row) s.probability /= total;
  }
  m.start_cdf.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += ctx.weights[i] * m.tau[i];
    m.start_cdf[i] = acc;
  }
  m.roof_mean = acc;
  for (double& c : m.start_cdf) c /= acc;
  return m;
}

/// Largest deviation of a chain row sum from 1 before renormalization.
inline double chain_row_defect(const OperatorContext& ctx) {
  const TransferMatrix p = normalized_operator(ctx, TwistSpec{0, 0.0, ctx.delta});
  std::vector<double> sums(p.dimension, 0.0);
  const std::size_t nnz = static_cast<std::size_t>(p.row_nnz);
  for (std::size_t w = 0; w < p.dimension; ++w) {
    for (std::size_t t = 0; t < nnz; ++t) {
      const std::size_t v = p.columns[w * nnz + t];
      sums[v] += ctx.weights[w] * p.values[w * nnz + t].real() / ctx.weights[v];
    }
  }
  double worst = 0.0;
  for (double s : sums) worst = std::max(worst, std::abs(s - 1.0));
  return worst;
}

struct SuspensionState {
  std::size_t cylinder = 0;
  double s = 0.0;       ///< fiber time in [0, tau(cylinder))
  double angle = 0.0;   ///< circle coordinate in [0, 2 pi)
  double elapsed = 0.0; ///< flow time since the trajectory's origin
  std::size_t step = 0; ///< number of roof crossings since the origin
};

/// A sampled point together with its lazily extended future itinerary.
/// States are recomputed from the absolute time s_0 + elapsed, so flowing by
/// t_1 and then t_2 lands exactly where flowing by t_1 + t_2 does.
class Trajectory {
 public:
  Trajectory(const SuspensionModel& model, std::mt19937_64 rng, std::size_t start, double s0, double angle0)
      : model_(&model), rng_(rng), s0_(s0), angle0_(angle0) {
    itinerary_.push_back(start);
    tau_prefix_.push_back(0.0);
    theta_prefix_.push_back(0.0);
  }

  SuspensionState initial() const { return {itinerary_[0], s0_, angle0_, 0.0, 0}; }

  SuspensionState flow(const SuspensionState& from, double t) {
    if (!(t >= 0.0)) throw EvaluationError("flow: t must be >= 0");
    const double elapsed = from.elapsed + t;
    const double absolute = s0_ + elapsed;
    while (tau_prefix_.back() + model_->tau[itinerary_.back()] <= absolute) extend();
    const auto it = std::upper_bound(tau_prefix_.begin(), tau_prefix_.end(), absolute);
    const std::size_t n = static_cast<std::size_t>(it - tau_prefix_.begin()) - 1;
    SuspensionState out;
    out.cylinder = itinerary_[n];
    out.s = absolute - tau_prefix_[n];
    out.angle = wrap(angle0_ + theta_prefix_[n]);
    out.elapsed = elapsed;
    out.step = n;
    return out;
  }

  /// Cylinder, cumulative roof and cumulative holonomy after n crossings.
  std::size_t cylinder_at(std::size_t n) {
    while (itinerary_.size() <= n) extend();
    return itinerary_[n];
  }
  double roof_sum(std::size_t n) {
    cylinder_at(n);
    return tau_prefix_[n];
  }
  double holonomy_sum(std::size_t n) {
    cylinder_at(n);
    return theta_prefix_[n];
  }
  double origin_s() const { return s0_; }
  double origin_angle() const { return angle0_; }

 private:
  static double wrap(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
  }

  void extend() {
    const std::size_t v = itinerary_.back();
    const auto& row = model_->successors[v];
    const double u = unit_uniform(rng_);
    double acc = 0.0;
    std::size_t next = row.back().target;
    for (const auto& s : row) {
      acc += s.probability;
      if (u < acc) {
        next = s.target;
        break;
      }
    }
    tau_prefix_.push_back(tau_prefix_.back() + model_->tau[v]);
    theta_prefix_.push_back(theta_prefix_.back() + model_->theta[v]);
    itinerary_.push_back(next);
  }

  const SuspensionModel* model_;
  std::mt19937_64 rng_;
  double s0_;
  double angle0_;
  std::vector<std::size_t> itinerary_;
  std::vector<double> tau_prefix_;
  std::vector<double> theta_prefix_;
};

/// Draws sample `index` of a run: cylinder from nu_hat tau, s uniform on the
/// fiber, angle uniform on the circle.
inline Trajectory sample_trajectory(const SuspensionModel& model, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng = stream_rng(seed, index);
  const double u = unit_uniform(rng);
  const auto it = std::upper_bound(model.start_cdf.begin(), model.start_cdf.end(), u);
  const std::size_t cyl = std::min(static_cast<std::size_t>(it - model.start_cdf.begin()), model.size() - 1);
  const double s = unit_uniform(rng) * model.tau[cyl];
  const double angle = unit_uniform(rng) * kTwoPi;
  return Trajectory(model, rng, cyl, s, angle);
}

inline std::vector<SuspensionState> sample_stationary(const SuspensionModel& model, std::size_t count,
                                                      std::uint64_t seed) {
  std::vector<SuspensionState> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample_trajectory(model, seed, i).initial());
  return out;
}

// ---------------------------------------------------------------------------
// Observables

/// Fiber profiles f(u, s): "zero", "one", "ind:j" (first symbol j, smoothed by
/// sin^2(pi s / tau)), "cos:m" and "sin:m" (in 2 pi m s / tau).
struct Observable {
  enum class Kind { zero, one, indicator, cosine, sine };
  Kind kind = Kind::one;
  int index = 0;

  static Observable parse(const std::string& text) {
    Observable o;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    int arg = 0;
    if (colon != std::string::npos) {
      try {
        std::size_t used = 0;
        arg = std::stoi(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        throw ConfigError("observable '" + text + "': malformed index");
      }
    }
    if (head == "zero" && colon == std::string::npos) {
      o.kind = Kind::zero;
    } else if (head == "one" && colon == std::string::npos) {
      o.kind = Kind::one;
    } else if (head == "ind" && colon != std::string::npos) {
      o.kind = Kind::indicator;
    } else if (head == "cos" && colon != std::string::npos) {
      o.kind = Kind::cosine;
    } else if (head == "sin" && colon != std::string::npos) {
      o.kind = Kind::sine;
    } else {
      throw ConfigError("observable '" + text + "': expected zero, one, ind:j, cos:m or sin:m");
    }
    o.index = arg;
    return o;
  }

  std::string name() const {
    switch (kind) {
      case Kind::zero: return "zero";
      case Kind::one: return "one";
      case Kind::indicator: return "ind:" + std::to_string(index);
      case Kind::cosine: return "cos:" + std::to_string(index);
      case Kind::sine: return "sin:" + std::to_string(index);
    }
    return "";
  }

  double value(int first_symbol, double s, double tau) const {
    switch (kind) {
      case Kind::zero: return 0.0;
      case Kind::one: return 1.0;
      case Kind::indicator: {
        if (first_symbol != index) return 0.0;
        const double v = std::sin(kPi * s / tau);
        return v * v;
      }
      case Kind::cosine: return std::cos(kTwoPi * index * s / tau);
      case Kind::sine: return std::sin(kTwoPi * index * s / tau);
    }
    return 0.0;
  }

  double value(const SuspensionModel& model, const SuspensionState& x) const {
    return value(model.first_symbol(x.cylinder), x.s, model.tau[x.cylinder]);
  }
};

// ---------------------------------------------------------------------------
// Correlations

struct DecayFit {
  bool determinate = false;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;  ///< one past the last grid point used
  double slope = 0.0;
  double slope_upper95 = 0.0;  ///< one-sided bootstrap bound
  bool negative_with_confidence = false;
};

struct CorrelationSeries {
  std::vector<double> t;
  std::vector<cplx> estimate;
  std::vector<double> stderr_;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  int k = 0;
  double second_moment = 0.0;  ///< empirical E|G|^2 at the sampled points
  cplx constant{};             ///< m(f) conj(m(g)) for k = 0, else 0
  std::vector<cplx> residual;  ///< estimate - constant
  DecayFit fit;
};

inline constexpr std::size_t kCorrelationBatches = 20;
inline constexpr int kBootstrapResamples = 1000;
inline constexpr std::size_t kMinFitPoints = 5;

namespace detail {

// Least-squares slope of log|y| against t over [begin, end).
inline double log_slope(std::span<const double> t, std::span<const cplx> y, std::size_t begin, std::size_t end) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double n = static_cast<double>(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const double ly = std::log(std::abs(y[i]));
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace detail

/// C(t) = mean over stationary samples of F(flow_t x) conj(G(x)) with
/// F = f e^{ik angle}, G = g e^{ik angle}. The decay fit uses the leading run
/// of grid points where |C - constant| exceeds three standard errors.
inline CorrelationSeries correlate(const SuspensionModel& model, int k, const Observable& f, const Observable& g,
                                   std::span<const double> t_grid, std::size_t samples, std::uint64_t seed,
                                   unsigned workers = 1) {
  if (samples < kCorrelationBatches) throw ConfigError("correlate: need at least 20 samples");
  const std::size_t nt = t_grid.size();
  const std::size_t batches = kCorrelationBatches;
  struct Batch {
    std::vector<cplx> sum;
    std::vector<double> sq;
    double g_sq = 0.0;
    cplx f_mean{};
    cplx g_mean{};
    std::size_t count = 0;
  };
  std::vector<Batch> acc(batches);
  parallel_for(batches, workers, [&](std::size_t b) {
    Batch& out = acc[b];
    out.sum.assign(nt, cplx{});
    out.sq.assign(nt, 0.0);
    const std::size_t lo = b * samples / batches;
    const std::size_t hi = (b + 1) * samples / batches;
    for (std::size_t i = lo; i < hi; ++i) {
      Trajectory traj = sample_trajectory(model, seed, i);
      const SuspensionState x0 = traj.initial();
      const cplx g0 = g.value(model, x0) * std::polar(1.0, k * x0.angle);
      out.g_sq += std::norm(g0);
      out.g_mean += g0;
      out.f_mean += f.value(model, x0) * std::polar(1.0, k * x0.angle);
      for (std::size_t j = 0; j < nt; ++j) {
        const SuspensionState xt = traj.flow(x0, t_grid[j]);
        const cplx ft = f.value(model, xt) * std::polar(1.0, k * xt.angle);
        const cplx term = ft * std::conj(g0);
        out.sum[j] += term;
        out.sq[j] += std::norm(term);
      }
      ++out.count;
    }
  });

  CorrelationSeries cs;
  cs.t.assign(t_grid.begin(), t_grid.end());
  cs.samples = samples;
  cs.seed = seed;
  cs.k = k;
  const double n = static_cast<double>(samples);
  cs.estimate.assign(nt, cplx{});
  cs.stderr_.assign(nt, 0.0);
  std::vector<double> sq(nt, 0.0);
  cplx f_mean{}, g_mean{};
  for (const Batch& b : acc) {
    for (std::size_t j = 0; j < nt; ++j) {
      cs.estimate[j] += b.sum[j];
      sq[j] += b.sq[j];
    }
    cs.second_moment += b.g_sq;
    f_mean += b.f_mean;
    g_mean += b.g_mean;
  }
  cs.second_moment /= n;
  for (std::size_t j = 0; j < nt; ++j) {
    cs.estimate[j] /= n;
    const double var = std::max(0.0, sq[j] / n - std::norm(cs.estimate[j]));
    cs.stderr_[j] = std::sqrt(var / std::max(1.0, n - 1.0));
  }
  cs.constant = k == 0 ? (f_mean / n) * std::conj(g_mean / n) : cplx{};
  cs.residual.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) cs.residual[j] = cs.estimate[j] - cs.constant;

  // Fit window: leading run above three standard errors.
  std::size_t end = 0;
  while (end < nt && std::abs(cs.residual[end]) > 3.0 * cs.stderr_[end]) ++end;
  if (end < kMinFitPoints) return cs;
  DecayFit& fit = cs.fit;
  fit.determinate = true;
  fit.window_begin = 0;
  fit.window_end = end;
  fit.slope = detail::log_slope(cs.t, cs.residual, 0, end);

  // Batch bootstrap of the slope.
  std::mt19937_64 rng = stream_rng(seed, 0xB0075742ULL);
  std::vector<double> slopes;
  std::vector<cplx> boot(end);
  for (int r = 0; r < kBootstrapResamples; ++r) {
    std::fill(boot.begin(), boot.end(), cplx{});
    std::size_t total = 0;
    cplx fm{}, gm{};
    for (std::size_t b = 0; b < batches; ++b) {
      const Batch& pick = acc[static_cast<std::size_t>(rng() % batches)];
      for (std::size_t j = 0; j < end; ++j) boot[j] += pick.sum[j];
      fm += pick.f_mean;
      gm += pick.g_mean;
      total += pick.count;
    }
    const double m = static_cast<double>(total);
    const cplx c = k == 0 ? (fm / m) * std::conj(gm / m) : cplx{};
    bool usable = true;
    for (std::size_t j = 0; j < end; ++j) {
      boot[j] = boot[j] / m - c;
      if (std::abs(boot[j]) == 0.0) usable = false;
    }
    if (usable) slopes.push_back(detail::log_slope(cs.t, boot, 0, end));
  }
  std::sort(slopes.begin(), slopes.end());
  if (!slopes.empty()) {
    const std::size_t q = std::min(slopes.size() - 1, static_cast<std::size_t>(std::ceil(0.95 * slopes.size())) - 1);
    fit.slope_upper95 = slopes[q];
    fit.negative_with_confidence = fit.slope_upper95 < 0.0;
  } else {
    fit.slope_upper95 = std::numeric_limits<double>::infinity();
  }
  return cs;
}

/// Throws IndeterminateError when the series never rose above the noise.
inline const DecayFit& require_fit(const CorrelationSeries& cs) {
  if (!cs.fit.determinate) {
    throw IndeterminateError("correlate: fewer than 5 leading grid points above 3 standard errors; decay rate is indeterminate");
  }
  return cs.fit;
}

// ---------------------------------------------------------------------------
// Laplace transform against the operator series

struct LaplaceReport {
  cplx series{};
  cplx mc{};
  double mc_stderr = 0.0;
  double discrepancy = 0.0;  ///< |mc - series| / |series|, or |mc - series| when the series vanishes
  int terms = 0;
  double tail_estimate = 0.0;
  std::size_t samples = 0;
  int depth = 0;
};

inline constexpr int kDefaultLaplaceTerms = 4000;

/// Compares two sides of
///   int_0^inf e^{-xi t} rho(t) dt  (terms after the first roof crossing)
///   = sum_{n>=1} sum_w nu_hat_w (P^n_{delta+xi,k} f_hat)(w) conj(g_hat(w)) / nu_hat(tau)
/// where rho(t) = E[F(x) conj(G(flow_t x))], f_hat = int_0^tau e^{xi s} f ds
/// and g_hat = int_0^tau e^{-conj(xi) s} g ds. Both sides are reported
/// multiplied by nu_hat(tau). F carries e^{i k_f angle}, G carries e^{i k_g angle}.
inline LaplaceReport laplace_consistency(const SuspensionModel& model, cplx xi, int k_f, int k_g, const Observable& f,
                                         const Observable& g, std::size_t samples, std::uint64_t seed,
                                         int max_terms = kDefaultLaplaceTerms, unsigned workers = 1) {
  if (!(xi.real() > 0.0)) throw ConfigError("laplace: Re(xi) must be positive");
  const OperatorContext& ctx = *model.ctx;
  const std::size_t n = model.size();
  using Quad = boost::math::quadrature::gauss<double, 30>;

  std::vector<cplx> f_hat(n), g_hat(n);
  for (std::size_t w = 0; w < n; ++w) {
    const int first = model.first_symbol(w);
    const double tau = model.tau[w];
    f_hat[w] = Quad::integrate([&](double s) { return std::exp(xi * s) * f.value(first, s, tau); }, 0.0, tau);
    g_hat[w] = Quad::integrate([&](double s) { return std::exp(-std::conj(xi) * s) * g.value(first, s, tau); }, 0.0, tau);
  }

  LaplaceReport rep;
  rep.samples = samples;
  rep.depth = ctx.cylinders.depth();

  // Series side. M-orthogonality makes it vanish identically for k_f != k_g.
  if (k_f == k_g) {
    const TransferMatrix op = normalized_operator(ctx, TwistSpec{k_f, xi.imag(), ctx.delta + xi.real()});
    std::vector<cplx> x = f_hat, y(n);
    double last = 0.0;
    for (int term = 1; term <= max_terms; ++term) {
      op.apply(x, y);
      std::swap(x, y);
      cplx value{};
      for (std::size_t w = 0; w < n; ++w) value += ctx.weights[w] * x[w] * std::conj(g_hat[w]);
      rep.series += value;
      rep.terms = term;
      const double size = std::abs(value);
      const double ratio = last > 0.0 ? size / last : 1.0;
      rep.tail_estimate = ratio < 1.0 ? size * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
      last = size;
      if (term > 4 && rep.tail_estimate <= 1e-15 * std::max(1e-300, std::abs(rep.series))) break;
      if (size == 0.0) {
        rep.tail_estimate = 0.0;
        break;
      }
    }
    const double scale = std::abs(rep.series);
    if (scale > 0.0 && rep.tail_estimate > 0.01 * scale) {
      throw ConvergenceError("laplace: operator series not converged after " + std::to_string(rep.terms) +
                             " terms (tail estimate " + std::to_string(rep.tail_estimate / scale) + " relative)");
    }
  }

  // Monte Carlo side.
  const std::size_t batches = kCorrelationBatches;
  std::vector<cplx> sums(batches);
  std::vector<double> squares(batches, 0.0);
  const double cutoff = 1e-16;
  parallel_for(batches, workers, [&](std::size_t b) {
    const std::size_t lo = b * samples / batches;
    const std::size_t hi = (b + 1) * samples / batches;
    for (std::size_t i = lo; i < hi; ++i) {
      Trajectory traj = sample_trajectory(model, seed, i);
      const SuspensionState x0 = traj.initial();
      const double f0 = f.value(model, x0);
      if (f0 == 0.0) continue;
      const cplx lead = f0 * std::exp(xi * x0.s) * std::polar(1.0, (k_f - k_g) * x0.angle);
      cplx acc{};
      for (std::size_t step = 1;; ++step) {
        const double roof = traj.roof_sum(step);
        const double decay = std::exp(-xi.real() * (roof - x0.s));
        if (decay < cutoff) break;
        const std::size_t v = traj.cylinder_at(step);
        acc += std::exp(-xi * roof) * std::polar(1.0, -k_g * traj.holonomy_sum(step)) * std::conj(g_hat[v]);
      }
      const cplx term = lead * acc;
      sums[b] += term;
      squares[b] += std::norm(term);
    }
  });
  cplx total{};
  double sq = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    total += sums[b];
    sq += squares[b];
  }
  const double ns = static_cast<double>(samples);
  const cplx mean = total / ns;
  rep.mc = model.roof_mean * mean;
  rep.mc_stderr = model.roof_mean * std::sqrt(std::max(0.0, sq / ns - std::norm(mean)) / std::max(1.0, ns - 1.0));
  const double diff = std::abs(rep.mc - rep.series);
  rep.discrepancy = std::abs(rep.series) > 0.0 ? diff / std::abs(rep.series) : diff;
  return rep;
}

// ---------------------------------------------------------------------------
// Non-local integrability

struct NliReport {
  double epsilon_0 = 0.0;
  double theta_certificate = 0.0;  ///< the same quantity for the pure-holonomy direction w = (0, 1)
  double max_directional = 0.0;    ///< largest |<w, J z>| seen
  std::vector<Word> branches;      ///< branch 0 first
  int domain_symbol = 0;
  std::size_t grid_points = 0;
  std::size_t boundary_directions = 0;
  int am_directions = 0;
};

inline constexpr int kAmDirections = 64;

namespace detail {

// Jacobian of u -> (tau_N, theta_N)(u) along the branch, columns d/dx, d/dy.
struct Jacobian2 {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

inline Jacobian2 cocycle_jacobian(const SchottkyScheme& scheme, std::span<const int> word, cplx u, double h) {
  Jacobian2 j;
  const cplx steps[2] = {cplx{h, 0.0}, cplx{0.0, h}};
  for (int c = 0; c < 2; ++c) {
    const CocycleValue plus = birkhoff(scheme, word, u + steps[c]);
    const CocycleValue minus = birkhoff(scheme, word, u - steps[c]);
    j.m[0][c] = (plus.tau - minus.tau) / (2.0 * h);
    j.m[1][c] = fold_angle(plus.theta - minus.theta) / (2.0 * h);
  }
  return j;
}

}  // namespace detail

/// Certificate for an explicit branch family (branch 0 first) on the domain
/// cylinder D_c. Base points u are depth-g markers in D_c; boundary
/// directions z are unit secants from u to the depth-(g+2) markers of its own
/// cylinder, so they follow the limit set. AM directions w form a uniform grid
/// on the unit circle of R^2 = (tau, theta).
inline NliReport nli_evaluate(const SchottkyScheme& scheme, std::vector<Word> branches, int domain_symbol,
                              int grid_depth, std::size_t grid_points, int am_directions = kAmDirections) {
  if (grid_depth < 1) throw ConfigError("nli: grid depth must be >= 1");
  if (branches.empty()) throw ConfigError("nli: empty branch family");
  const int c = domain_symbol;
  for (const Word& w : branches) {
    if (!is_admissible(scheme, w) || !scheme.admissible(w.back(), c)) {
      throw EvaluationError("nli: branch " + word_to_string(scheme, w) + " is not defined on the domain cylinder");
    }
  }
  NliReport rep;
  rep.domain_symbol = c;
  rep.am_directions = am_directions;
  rep.branches = std::move(branches);

  const CylinderSet coarse = enumerate_cylinders(scheme, grid_depth);
  const CylinderSet fine = enumerate_cylinders(scheme, grid_depth + 2);
  std::vector<std::size_t> base;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (coarse[i].word.front() == c) base.push_back(i);
  }
  std::vector<std::size_t> chosen;
  const std::size_t take = std::min(grid_points, base.size());
  for (std::size_t i = 0; i < take; ++i) chosen.push_back(base[i * base.size() / take]);
  rep.grid_points = chosen.size();
  if (rep.branches.size() == 1 || chosen.empty()) return rep;

  std::vector<cplx> am;
  for (int d = 0; d < am_directions; ++d) am.push_back(std::polar(1.0, kTwoPi * d / am_directions));

  rep.epsilon_0 = std::numeric_limits<double>::infinity();
  rep.theta_certificate = std::numeric_limits<double>::infinity();
  const std::size_t family = static_cast<std::size_t>(scheme.branching());
  for (std::size_t idx : chosen) {
    const Cylinder& cell = coarse[idx];
    const cplx u = cell.marker;
    const double h = 1e-4 * cell.radius_bound;
    if (h < 1e-12 * std::max(1.0, std::abs(u))) {
      throw EvaluationError("nli: finite-difference step " + std::to_string(h) + " is below the noise floor");
    }
    // Children of `cell` at depth g + 2 are a contiguous block.
    std::vector<cplx> dirs;
    const std::size_t block = family * family;
    const std::size_t first_child = idx * block;
    for (std::size_t t = 0; t < block; ++t) {
      const cplx d = fine[first_child + t].marker - u;
      if (std::abs(d) > 0.0) dirs.push_back(d / std::abs(d));
    }
    rep.boundary_directions = std::max(rep.boundary_directions, dirs.size());

    const detail::Jacobian2 j0 = detail::cocycle_jacobian(scheme, rep.branches[0], u, h);
    // Images D_j z for every branch j >= 1 and direction z.
    std::vector<std::pair<double, double>> images;
    for (std::size_t b = 1; b < rep.branches.size(); ++b) {
      const detail::Jacobian2 jb = detail::cocycle_jacobian(scheme, rep.branches[b], u, h);
      double d[2][2];
      for (int r = 0; r < 2; ++r) {
        for (int q = 0; q < 2; ++q) d[r][q] = j0.m[r][q] - jb.m[r][q];
      }
      for (const cplx& z : dirs) {
        images.emplace_back(d[0][0] * z.real() + d[0][1] * z.imag(), d[1][0] * z.real() + d[1][1] * z.imag());
      }
    }
    for (const cplx& w : am) {
      double best = 0.0;
      for (const auto& [tx, ty] : images) best = std::max(best, std::abs(w.real() * tx + w.imag() * ty));
      rep.epsilon_0 = std::min(rep.epsilon_0, best);
      rep.max_directional = std::max(rep.max_directional, best);
    }
    double theta_best = 0.0;
    for (const auto& img : images) theta_best = std::max(theta_best, std::abs(img.second));
    rep.theta_certificate = std::min(rep.theta_certificate, theta_best);
  }
  return rep;
}

/// Branches are words of length N with first symbol c = domain_symbol whose
/// last symbol may precede c; branch 0 is the least such word and
/// `branch_count` others are drawn with the seed.
inline NliReport nli_certificate(const SchottkyScheme& scheme, int N, int branch_count, int grid_depth,
                                 std::size_t grid_points, std::uint64_t seed, int domain_symbol = 0,
                                 int am_directions = kAmDirections) {
  if (N < 2) throw ConfigError("nli: N must be >= 2");
  if (domain_symbol < 0 || domain_symbol >= scheme.symbol_count()) throw ConfigError("nli: domain symbol out of range");
  const int c = domain_symbol;
  std::vector<Word> candidates;
  for (const Cylinder& cyl : enumerate_cylinders(scheme, N)) {
    if (cyl.word.front() == c && scheme.admissible(cyl.word.back(), c)) candidates.push_back(cyl.word);
  }
  std::vector<Word> family{candidates.front()};
  std::vector<Word> rest(candidates.begin() + 1, candidates.end());
  std::mt19937_64 rng(seed);
  std::shuffle(rest.begin(), rest.end(), rng);
  const std::size_t extra = std::min(rest.size(), static_cast<std::size_t>(std::max(0, branch_count)));
  family.insert(family.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(extra));
  return nli_evaluate(scheme, std::move(family), c, grid_depth, grid_points, am_directions);
}

// ---------------------------------------------------------------------------
// Fourier modes on the circle

struct FourierReport {
  std::vector<int> k;
  std::vector<cplx> modes;  ///< v_k = (1/n) sum_j v(theta_j) e^{-i k theta_j}
  double norm_proxy = 0.0;  ///< max |m-th cyclic difference| / step^m
  double bound_ratio = 0.0; ///< max_{k != 0} |v_k| |k|^m / norm_proxy
  int m = 0;
};

/// Direct DFT of uniform samples on [0, 2 pi). Modes up to k_max = n / 4.
inline FourierReport fourier_decay_check(std::span<const double> samples, int m, int k_max = -1) {
  const std::size_t n = samples.size();
  if (k_max < 0) k_max = static_cast<int>(n / 4);
  if (n < 4 * static_cast<std::size_t>(std::max(1, k_max))) {
    throw EvaluationError("fourier: resolution " + std::to_string(n) + " is below 4 k_max = " + std::to_string(4 * k_max));
  }
  FourierReport rep;
  rep.m = m;
  const double step = kTwoPi / static_cast<double>(n);
  for (int k = -k_max; k <= k_max; ++k) {
    cplx sum{};
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce k j mod n before scaling so the phase stays exact for large k.
      const long long idx = (static_cast<long long>(k) * static_cast<long long>(j)) % static_cast<long long>(n);
      sum += samples[j] * std::polar(1.0, -step * static_cast<double>(idx));
    }
    rep.k.push_back(k);
    rep.modes.push_back(sum / static_cast<double>(n));
  }
  std::vector<double> diff(samples.begin(), samples.end()), next(n);
  for (int order = 0; order < m; ++order) {
    for (std::size_t j = 0; j < n; ++j) next[j] = diff[(j + 1) % n] - diff[j];
    std::swap(diff, next);
  }
  double top = 0.0;
  for (double d : diff) top = std::max(top, std::abs(d));
  rep.norm_proxy = top / std::pow(step, m);
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.k.size(); ++i) {
    if (rep.k[i] == 0) continue;
    worst = std::max(worst, std::abs(rep.modes[i]) * std::pow(std::abs(rep.k[i]), m));
  }
  rep.bound_ratio = rep.norm_proxy > 0.0 ? worst / rep.norm_proxy : 0.0;
  return rep;
}

}  // namespace hyperdyn
