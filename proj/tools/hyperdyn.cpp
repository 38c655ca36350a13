// hyperdyn command-line driver.
//
// Every subcommand reads a JSON config, prints one JSON object (with a
// "manifest" member) on stdout and, with --out DIR, writes its CSV tables and
// the same JSON into DIR.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hyperdyn/hyperdyn.hpp"

namespace {

using hyperdyn::CsvWriter;
using json = nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string out_dir;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

struct Run {
  hyperdyn::Config config;
  hyperdyn::SchottkyScheme scheme;
  unsigned workers = 1;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config_path, "JSON config file")->required();
  cmd->add_option("--out", c.out_dir, "directory for CSV and JSON outputs");
  cmd->add_option("--workers", c.workers, "worker threads (default: HYPERDYN_WORKERS or 1)");
  cmd->add_option("--seed", c.seed, "random seed (default: config defaults.seed)");
  cmd->add_flag("--timing", c.timing, "include wall time in the manifest");
}

Run open_run(const Common& c) {
  Run r;
  r.config = hyperdyn::load_config(c.config_path);
  r.scheme = hyperdyn::build_scheme(r.config.generators);
  r.workers = c.workers > 0 ? c.workers : hyperdyn::workers_from_env();
  r.seed = c.seed.value_or(r.config.defaults.seed);
  return r;
}

void emit(const std::string& command, const Common& c, const Run& run, json parameters, json body,
          std::chrono::steady_clock::time_point start, const std::vector<std::pair<std::string, CsvWriter>>& tables) {
  json manifest;
  manifest["config_digest"] = hyperdyn::config_digest(run.config);
  manifest["command"] = command;
  manifest["parameters"] = std::move(parameters);
  manifest["seed"] = run.seed;
  manifest["tool_version"] = hyperdyn::kToolVersion;
  if (c.timing) {
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  json doc;
  doc["manifest"] = std::move(manifest);
  for (auto& [key, value] : body.items()) doc[key] = value;
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!c.out_dir.empty()) {
    std::filesystem::create_directories(c.out_dir);
    for (const auto& [name, table] : tables) table.write(c.out_dir + "/" + name);
    std::ofstream(c.out_dir + "/" + command + ".json", std::ios::binary) << text;
  }
}

json warnings_json(const std::vector<std::string>& w) {
  json arr = json::array();
  for (const auto& s : w) arr.push_back(s);
  return arr;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw hyperdyn::ConfigError(std::string(what) + ": malformed list '" + text + "'");
    }
  }
  if (out.empty()) throw hyperdyn::ConfigError(std::string(what) + ": empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw hyperdyn::ConfigError(std::string(what) + ": malformed list '" + text + "'");
    }
  }
  if (out.empty()) throw hyperdyn::ConfigError(std::string(what) + ": empty list");
  return out;
}

hyperdyn::Orientation parse_orientation(const std::string& s) {
  if (s == "oriented") return hyperdyn::Orientation::oriented;
  if (s == "unoriented") return hyperdyn::Orientation::unoriented;
  throw hyperdyn::ConfigError("--orientation: expected oriented or unoriented");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted transfer operators, geodesics and mixing for Schottky groups"};
  app.require_subcommand(1);
  const auto start = std::chrono::steady_clock::now();
  Common common;
  int exit_code = 0;

  // validate
  int samples = 256;
  auto* validate = app.add_subcommand("validate", "check geometry and report contraction constants");
  add_common(validate, common);
  validate->add_option("--samples", samples, "boundary and interior samples per domain disk");

  // delta
  std::optional<int> depth;
  std::optional<double> tol;
  auto* delta_cmd = app.add_subcommand("delta", "critical exponent from lambda(s) = 1");
  add_common(delta_cmd, common);
  delta_cmd->add_option("--depth", depth, "cylinder depth");
  delta_cmd->add_option("--tol", tol, "bisection tolerance");

  // scan
  std::optional<double> a_opt;
  double b_min = -50.0, b_max = 50.0, b_step = 2.5;
  int k_max = 20;
  std::optional<int> iters;
  auto* scan = app.add_subcommand("scan", "spectral radius estimates over a (b, k) grid");
  add_common(scan, common);
  scan->add_option("--a", a_opt, "real part (default: delta)");
  scan->add_option("--b-min", b_min);
  scan->add_option("--b-max", b_max);
  scan->add_option("--b-step", b_step);
  scan->add_option("--k-max", k_max, "k ranges over -k_max..k_max");
  scan->add_option("--depth", depth);
  scan->add_option("--iters", iters, "iterations n for rho_est");

  // geodesics
  std::optional<int> max_len;
  std::optional<double> T_opt;
  std::string orientation = "oriented";
  auto* geo = app.add_subcommand("geodesics", "enumerate primitive closed geodesics");
  add_common(geo, common);
  geo->add_option("--max-len", max_len, "maximal cyclic word length");
  geo->add_option("--T", T_opt, "report N(T)");
  geo->add_option("--orientation", orientation, "oriented or unoriented");

  // equidist
  int eq_kmax = 5, points = 9;
  double fraction = 0.75;
  auto* equi = app.add_subcommand("equidist", "counting and holonomy character sums");
  add_common(equi, common);
  equi->add_option("--max-len", max_len);
  equi->add_option("--k-max", eq_kmax);
  equi->add_option("--points", points, "T grid points");
  equi->add_option("--fraction", fraction, "grid starts at fraction * horizon");
  equi->add_option("--depth", depth, "depth used for delta");
  equi->add_option("--orientation", orientation);

  // mix
  int mix_k = 1;
  std::string f_name = "ind:0", g_name = "ind:0";
  double t_max = 15.0, t_step = 0.5;
  std::size_t mc_samples = 100000;
  auto* mix = app.add_subcommand("mix", "Monte Carlo correlation decay on the suspension");
  add_common(mix, common);
  mix->add_option("--k", mix_k, "circle character");
  mix->add_option("--f", f_name, "observable: zero, one, ind:j, cos:m, sin:m");
  mix->add_option("--g", g_name);
  mix->add_option("--t-max", t_max);
  mix->add_option("--t-step", t_step);
  mix->add_option("--samples", mc_samples);
  mix->add_option("--depth", depth);

  // measure
  std::size_t centers = 200, ncp_samples = 64;
  double largest_scale = 0.5;
  int scale_count = 30, directions = hyperdyn::kNcpDirections;
  std::string eps_list = "0.2,0.1,0.05";
  auto* measure = app.add_subcommand("measure", "equilibrium measure: doubling and non-concentration");
  add_common(measure, common);
  measure->add_option("--depth", depth);
  measure->add_option("--centers", centers);
  measure->add_option("--largest-scale", largest_scale);
  measure->add_option("--scales", scale_count, "number of dyadic scales");
  measure->add_option("--ncp-samples", ncp_samples);
  measure->add_option("--eps", eps_list, "comma-separated non-concentration scales");
  measure->add_option("--directions", directions);

  // nli
  int nli_n = 4, branches = 6, grid_depth = 3, domain = 0;
  std::size_t grid = 32;
  auto* nli = app.add_subcommand("nli", "Brin-Pesin non-local integrability certificate");
  add_common(nli, common);
  nli->add_option("--N", nli_n, "branch word length");
  nli->add_option("--branches", branches, "branches besides branch 0");
  nli->add_option("--grid-depth", grid_depth);
  nli->add_option("--grid", grid, "base points");
  nli->add_option("--domain", domain, "domain symbol (0-based)");

  // laplace
  double xi_re = 0.3, xi_im = 0.0;
  int lap_k = 1;
  std::optional<int> lap_kg;
  int terms = hyperdyn::kDefaultLaplaceTerms;
  auto* lap = app.add_subcommand("laplace", "Laplace transform of correlations against the operator series");
  add_common(lap, common);
  lap->add_option("--xi-re", xi_re);
  lap->add_option("--xi-im", xi_im);
  lap->add_option("--k", lap_k, "character of f");
  lap->add_option("--k-g", lap_kg, "character of g (default: same as f)");
  lap->add_option("--f", f_name);
  lap->add_option("--g", g_name);
  lap->add_option("--samples", mc_samples);
  lap->add_option("--depth", depth);
  lap->add_option("--terms", terms, "maximal series length");

  // ly
  int ly_k = 1;
  double ly_b = 0.0;
  std::string m_list = "1,2,4,8", probe = "linear";
  std::size_t pairs = 64;
  auto* ly = app.add_subcommand("ly", "Lasota-Yorke gradient bound");
  add_common(ly, common);
  ly->add_option("--k", ly_k);
  ly->add_option("--b", ly_b);
  ly->add_option("--a", a_opt, "real part (default: delta)");
  ly->add_option("--m", m_list, "comma-separated iterate counts");
  ly->add_option("--probe", probe, "linear or constant");
  ly->add_option("--pairs", pairs, "sibling pairs sampled");
  ly->add_option("--depth", depth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Run run = open_run(common);
    const auto& defaults = run.config.defaults;
    const int d = depth.value_or(defaults.depth);

    if (*validate) {
      const auto bounds = hyperdyn::estimate_contraction(run.scheme, samples);
      json body;
      body["valid"] = true;
      body["rank"] = run.scheme.rank();
      body["symbols"] = run.scheme.symbol_count();
      body["min_gap"] = run.scheme.min_gap();
      body["kappa_exact"] = 1.0 / run.scheme.max_one_step_derivative();
      body["kappa"] = bounds.kappa;
      body["kappa1"] = bounds.kappa1;
      body["c0"] = bounds.c0;
      body["fuchsian_degenerate"] = run.scheme.fuchsian_degenerate();
      body["warnings"] = warnings_json(run.scheme.warnings());
      for (const auto& w : run.scheme.warnings()) std::cerr << "warning: " << w << "\n";
      emit("validate", common, run, json{{"samples", samples}}, body, start, {});
    } else if (*delta_cmd) {
      const double t = tol.value_or(defaults.delta_tol);
      json body;
      if (run.scheme.rank() < 2) {
        body["delta"] = 0.0;
        body["depth"] = d;
        body["residual"] = 0.0;
      } else {
        const auto ctx = hyperdyn::make_context(run.scheme, d, t, defaults.cylinder_cap);
        body["delta"] = ctx.delta;
        body["depth"] = d;
        body["lambda"] = ctx.base.lambda;
        body["residual"] = ctx.base.residual;
        body["bisection_tol"] = t;
      }
      emit("delta", common, run, json{{"depth", d}, {"tol", t}}, body, start, {});
    } else if (*scan) {
      const int n = iters.value_or(defaults.iters);
      if (!(b_step > 0.0) || b_max < b_min) throw hyperdyn::ConfigError("scan: need b-step > 0 and b-max >= b-min");
      const auto ctx = hyperdyn::make_context(run.scheme, d, defaults.delta_tol, defaults.cylinder_cap);
      const double a = a_opt.value_or(ctx.delta);
      std::vector<double> bs;
      const int nb = static_cast<int>(std::floor((b_max - b_min) / b_step + 1e-9));
      for (int i = 0; i <= nb; ++i) bs.push_back(b_min + i * b_step);
      std::vector<int> ks;
      for (int k = -k_max; k <= k_max; ++k) ks.push_back(k);
      const auto rows = hyperdyn::scan_grid(ctx, a, bs, ks, n, run.workers, run.seed);
      CsvWriter csv({"b", "k", "a", "depth", "rho_est", "flagged", "m_half", "m_final", "domination_excess"});
      double best = -1.0, dom = -std::numeric_limits<double>::infinity();
      const hyperdyn::ScanRow* arg = nullptr;
      std::size_t flagged = 0;
      for (const auto& r : rows) {
        csv.row().add(r.b).add(r.k).add(r.a).add(r.depth).add(r.rho_est).add(r.flagged).add(r.m_half).add(r.m_final).add(
            r.domination_excess);
        dom = std::max(dom, r.domination_excess);
        if (r.flagged) {
          ++flagged;
          continue;
        }
        if (r.rho_est > best) {
          best = r.rho_est;
          arg = &r;
        }
      }
      json body;
      body["delta"] = ctx.delta;
      body["a"] = a;
      body["depth"] = d;
      body["cells"] = rows.size();
      body["flagged_cells"] = flagged;
      body["max_rho_unflagged"] = arg ? json(best) : json(nullptr);
      body["argmax"] = arg ? json{{"b", arg->b}, {"k", arg->k}} : json(nullptr);
      body["max_domination_excess"] = dom;
      emit("scan", common, run,
           json{{"a", a}, {"b_min", b_min}, {"b_max", b_max}, {"b_step", b_step}, {"k_max", k_max}, {"depth", d}, {"iters", n}},
           body, start, {{"scan.csv", csv}});
    } else if (*geo) {
      const int L = max_len.value_or(defaults.max_word_length);
      const auto records = hyperdyn::enumerate_classes(run.scheme, L, parse_orientation(orientation));
      const double horizon = hyperdyn::completeness_horizon(run.scheme, L);
      CsvWriter csv({"word", "length", "holonomy", "primitive"});
      std::size_t primitive = 0;
      for (const auto& r : records) {
        csv.row().add(hyperdyn::word_to_string(run.scheme, r.cyclic_word)).add(r.length).add(r.holonomy).add(r.primitive);
        if (r.primitive) ++primitive;
      }
      json body;
      body["max_word_length"] = L;
      body["orientation"] = orientation;
      body["classes"] = records.size();
      body["primitive"] = primitive;
      body["horizon"] = horizon;
      std::vector<std::string> warnings;
      if (T_opt) {
        body["T"] = *T_opt;
        body["count"] = hyperdyn::count(records, *T_opt, horizon, warnings);
      }
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      body["warnings"] = warnings_json(warnings);
      json params{{"max_len", L}, {"orientation", orientation}};
      if (T_opt) params["T"] = *T_opt;
      emit("geodesics", common, run, params, body, start, {{"geodesics.csv", csv}});
    } else if (*equi) {
      const int L = max_len.value_or(defaults.max_word_length);
      const double delta = hyperdyn::solve_delta(run.scheme, d, defaults.delta_tol, defaults.cylinder_cap);
      const auto records = hyperdyn::enumerate_classes(run.scheme, L, parse_orientation(orientation));
      const double horizon = hyperdyn::completeness_horizon(run.scheme, L);
      const auto grid_T = hyperdyn::top_grid(horizon, fraction, points);
      const auto rep = hyperdyn::equidist_sums(records, delta, grid_T, eq_kmax, horizon);
      std::vector<std::string> header{"T", "N", "li", "ratio", "S0"};
      for (int k = 1; k <= eq_kmax; ++k) header.push_back("abs_S" + std::to_string(k) + "_over_N");
      CsvWriter csv(header);
      json rows = json::array();
      for (std::size_t i = 0; i < rep.T.size(); ++i) {
        csv.row().add(rep.T[i]).add(rep.counts[i]).add(rep.li_values[i]).add(rep.count_ratio(i)).add(rep.sums[i][0].real());
        json ratios = json::array();
        for (int k = 1; k <= eq_kmax; ++k) {
          csv.add(rep.character_ratio(i, k));
          ratios.push_back(rep.character_ratio(i, k));
        }
        rows.push_back(json{{"T", rep.T[i]}, {"N", rep.counts[i]}, {"ratio", rep.count_ratio(i)}, {"abs_S_over_N_k1", ratios}});
      }
      json body;
      body["delta"] = delta;
      body["horizon"] = horizon;
      body["grid"] = rows;
      emit("equidist", common, run,
           json{{"max_len", L}, {"k_max", eq_kmax}, {"points", points}, {"fraction", fraction}, {"depth", d},
                {"orientation", orientation}},
           body, start, {{"equidist.csv", csv}});
    } else if (*mix) {
      const auto f = hyperdyn::Observable::parse(f_name);
      const auto g = hyperdyn::Observable::parse(g_name);
      if (!(t_step > 0.0) || t_max < 0.0) throw hyperdyn::ConfigError("mix: need t-step > 0 and t-max >= 0");
      const auto ctx = hyperdyn::make_context(run.scheme, d, defaults.delta_tol, defaults.cylinder_cap);
      const auto model = hyperdyn::make_suspension(ctx);
      std::vector<double> tg;
      const int nt = static_cast<int>(std::floor(t_max / t_step + 1e-9));
      for (int i = 0; i <= nt; ++i) tg.push_back(i * t_step);
      const auto cs = hyperdyn::correlate(model, mix_k, f, g, tg, mc_samples, run.seed, run.workers);
      CsvWriter csv({"t", "re", "im", "stderr"});
      bool flat = true;
      for (std::size_t i = 0; i < tg.size(); ++i) {
        csv.row().add(cs.t[i]).add(cs.estimate[i].real()).add(cs.estimate[i].imag()).add(cs.stderr_[i]);
        if (cs.residual[i] != hyperdyn::cplx{}) flat = false;
      }
      json body;
      body["k"] = mix_k;
      body["f"] = f.name();
      body["g"] = g.name();
      body["samples"] = mc_samples;
      body["seed"] = run.seed;
      body["second_moment"] = cs.second_moment;
      body["constant"] = json::array({cs.constant.real(), cs.constant.imag()});
      if (cs.fit.determinate) {
        body["status"] = "fitted";
        body["slope"] = cs.fit.slope;
        body["slope_upper95"] = cs.fit.slope_upper95;
        body["decay_with_confidence"] = cs.fit.negative_with_confidence;
        body["window"] = json::array({cs.t[cs.fit.window_begin], cs.t[cs.fit.window_end - 1]});
      } else {
        body["status"] = flat ? "flat" : "indeterminate";
        body["slope"] = nullptr;
      }
      emit("mix", common, run,
           json{{"k", mix_k}, {"f", f.name()}, {"g", g.name()}, {"t_max", t_max}, {"t_step", t_step},
                {"samples", mc_samples}, {"depth", d}},
           body, start, {{"mix.csv", csv}});
      if (!cs.fit.determinate && !flat) {
        std::cerr << "error: decay rate is indeterminate (fewer than 5 leading points above 3 standard errors)\n";
        exit_code = hyperdyn::IndeterminateError("").exit_code();
      }
    } else if (*measure) {
      const auto ctx = hyperdyn::make_context(run.scheme, d, defaults.delta_tol, defaults.cylinder_cap);
      const auto m = hyperdyn::equilibrium_measure(ctx);
      const auto cidx = hyperdyn::spread_centers(ctx.cylinders.size(), centers);
      const auto scales = hyperdyn::dyadic_scales(largest_scale, scale_count);
      const auto dr = hyperdyn::doubling_ratio(m, ctx.cylinders, cidx, scales, run.workers);
      const auto eps = parse_double_list(eps_list, "--eps");
      const auto ncp = hyperdyn::ncp_certificate(m, ctx.cylinders, ncp_samples, eps, directions, run.seed);
      CsvWriter csv({"center", "scale", "mass", "mass_double", "ratio"});
      for (const auto& r : dr.rows) csv.row().add(r.center).add(r.scale).add(r.mass).add(r.mass_double).add(r.mass_double / r.mass);
      json by_scale = json::array();
      for (std::size_t i = 0; i < dr.scales.size(); ++i) {
        by_scale.push_back(json{{"scale", dr.scales[i]},
                                {"sup_ratio", std::isnan(dr.sup_by_scale[i]) ? json(nullptr) : json(dr.sup_by_scale[i])}});
      }
      json body;
      body["depth"] = d;
      body["delta"] = ctx.delta;
      body["roof_average"] = hyperdyn::roof_average(m, run.scheme, ctx.cylinders);
      body["doubling_sup_ratio"] = dr.sup_ratio;
      body["doubling_by_scale"] = by_scale;
      body["skipped"] = dr.skipped;
      body["delta_star"] = ncp.delta_star;
      body["ncp_worst_case"] = json{{"point", json::array({ncp.worst_case.point.real(), ncp.worst_case.point.imag()})},
                                    {"direction", ncp.worst_case.direction},
                                    {"scale", ncp.worst_case.scale}};
      emit("measure", common, run,
           json{{"depth", d}, {"centers", centers}, {"largest_scale", largest_scale}, {"scales", scale_count},
                {"ncp_samples", ncp_samples}, {"eps", eps_list}, {"directions", directions}},
           body, start, {{"doubling.csv", csv}});
    } else if (*nli) {
      const auto rep = hyperdyn::nli_certificate(run.scheme, nli_n, branches, grid_depth, grid, run.seed, domain);
      json words = json::array();
      for (const auto& w : rep.branches) words.push_back(hyperdyn::word_to_string(run.scheme, w));
      json body;
      body["epsilon_0"] = rep.epsilon_0;
      body["theta_certificate"] = rep.theta_certificate;
      body["max_directional"] = rep.max_directional;
      body["branches"] = words;
      body["grid_points"] = rep.grid_points;
      body["boundary_directions"] = rep.boundary_directions;
      body["am_directions"] = rep.am_directions;
      emit("nli", common, run,
           json{{"N", nli_n}, {"branches", branches}, {"grid_depth", grid_depth}, {"grid", grid}, {"domain", domain}}, body,
           start, {});
    } else if (*lap) {
      const auto f = hyperdyn::Observable::parse(f_name);
      const auto g = hyperdyn::Observable::parse(g_name);
      const int kg = lap_kg.value_or(lap_k);
      const auto ctx = hyperdyn::make_context(run.scheme, d, defaults.delta_tol, defaults.cylinder_cap);
      const auto model = hyperdyn::make_suspension(ctx);
      const auto rep = hyperdyn::laplace_consistency(model, {xi_re, xi_im}, lap_k, kg, f, g, mc_samples, run.seed, terms,
                                                     run.workers);
      json body;
      body["series"] = json::array({rep.series.real(), rep.series.imag()});
      body["mc"] = json::array({rep.mc.real(), rep.mc.imag()});
      body["mc_stderr"] = rep.mc_stderr;
      body["discrepancy"] = rep.discrepancy;
      body["terms"] = rep.terms;
      body["tail_estimate"] = rep.tail_estimate;
      emit("laplace", common, run,
           json{{"xi", json::array({xi_re, xi_im})}, {"k", lap_k}, {"k_g", kg}, {"f", f.name()}, {"g", g.name()},
                {"samples", mc_samples}, {"depth", d}, {"terms", terms}},
           body, start, {});
    } else if (*ly) {
      const auto ms = parse_int_list(m_list, "--m");
      hyperdyn::LyProbe p;
      if (probe == "linear") {
        p = hyperdyn::LyProbe::linear;
      } else if (probe == "constant") {
        p = hyperdyn::LyProbe::constant;
      } else {
        throw hyperdyn::ConfigError("--probe: expected linear or constant");
      }
      const auto ctx = hyperdyn::make_context(run.scheme, d, defaults.delta_tol, defaults.cylinder_cap);
      const double a = a_opt.value_or(ctx.delta);
      const auto rep = hyperdyn::ly_check(ctx, hyperdyn::TwistSpec{ly_k, ly_b, a}, ms, p, pairs, run.workers);
      json a0 = json::array();
      for (std::size_t i = 0; i < rep.m_values.size(); ++i) a0.push_back(json{{"m", rep.m_values[i]}, {"A0", rep.a0[i]}});
      json body;
      body["a"] = a;
      body["A0"] = a0;
      body["spread"] = rep.spread;
      body["pairs"] = rep.pairs;
      emit("ly", common, run,
           json{{"k", ly_k}, {"b", ly_b}, {"a", a}, {"m", m_list}, {"probe", probe}, {"pairs", pairs}, {"depth", d}}, body,
           start, {});
    }
  } catch (const hyperdyn::Error& e) {
    json err{{"error", e.what()}, {"exit_code", e.exit_code()}};
    std::cerr << err.dump() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    json err{{"error", e.what()}, {"exit_code", 1}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return exit_code;
}
