#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "kci/comparison.hpp"
#include "kci/config.hpp"
#include "kci/descriptors.hpp"
#include "kci/equilibria.hpp"
#include "kci/errors.hpp"
#include "kci/evolution.hpp"
#include "kci/parallel.hpp"
#include "kci/plot.hpp"
#include "kci/pullback.hpp"
#include "kci/regions.hpp"
#include "kci/serialize.hpp"
#include "kci/spatial.hpp"

namespace kci::cli {

namespace detail {

// Resolves one option at a time and records the final value, so every run can
// write back the exact config that reproduces it.
struct Resolver {
  json resolved = json::object();

  double num(const std::string& key, std::optional<double> v, double def) {
    double out = v.value_or(def);
    resolved[key] = out;
    return out;
  }
  long integer(const std::string& key, std::optional<long> v, long def) {
    long out = v.value_or(def);
    resolved[key] = out;
    return out;
  }
  std::string str(const std::string& key, std::optional<std::string> v, std::string def) {
    std::string out = v.value_or(std::move(def));
    resolved[key] = out;
    return out;
  }
};

inline std::string out_path(const std::string& out_dir, const std::string& name) {
  return (std::filesystem::path(out_dir) / name).string();
}

inline void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  require(!ec, "cannot create output directory '" + out_dir + "': " + ec.message());
}

// low modes with seeded coefficients, sup roughly amp
inline Profile seeded_profile(const Grid& g, double amp, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double r[5];
  for (double& v : r) v = unit(rng);
  return Profile::from_function(g, [&](double x) {
    double s = 0.0;
    for (int k = 1; k <= 5; ++k) s += amp * r[k - 1] / k * std::sin(k * x);
    return s;
  });
}

// positive on (0, pi) for |wiggle| <= 1: sin x (1 - 0.4 cos x) > 0
inline Profile positive_profile(const Grid& g, double amp, double wiggle) {
  return Profile::from_function(
      g, [&](double x) { return amp * (std::sin(x) + 0.2 * wiggle * std::sin(2.0 * x)); });
}

inline void write_config(const Resolver& r, const std::string& out_dir) {
  write_text_file(out_path(out_dir, "config.json"), r.resolved.dump(2) + "\n");
}

inline std::string record_label(const EquilibriumRecord& rec) {
  if (rec.j == 0) return "e0";
  return "e" + std::to_string(rec.j) + (rec.sign > 0 ? "p" : "m");
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, const std::string& out_dir, bool plot) {
  detail::Resolver r;
  double lambda = r.num("lambda", cfg.lambda, 3.0);
  require(lambda > 0.0, "lambda must be positive");
  double b_default = cfg.b.value_or(1.0);
  require(b_default > 0.0, "b must be positive");
  std::string beta_desc = r.str("beta", cfg.beta, "constant:" + format_double(b_default));
  std::string a_desc = r.str("a", cfg.a, "saturating");
  long n = r.integer("n", cfg.n, defaults::grid_n);
  double dt = r.num("dt", cfg.dt, defaults::dt);
  require(dt > 0.0, "dt must be positive");
  double horizon = r.num("horizon", cfg.horizon, 10.0);
  require(horizon > 0.0, "horizon must be positive");
  double amp = r.num("amp", cfg.amp, 0.5);
  long seed = r.integer("seed", cfg.seed, 1);
  long sample_every = r.integer("sample_every", cfg.sample_every, 100);
  require(sample_every >= 1, "sample_every must be at least 1");

  auto problem =
      ProblemSpec::nonlocal(parse_diffusivity(a_desc), parse_beta(beta_desc, lambda));
  Grid g = Grid::make(static_cast<int>(n));
  Profile u0 = detail::seeded_profile(g, amp, static_cast<unsigned>(seed));

  CsvTable traj;
  traj.header = {"t", "sup", "h10", "a", "phi"};
  Stepper st(u0, 0.0, problem, dt);
  auto record = [&]() {
    double sup = 0.0;
    for (double v : st.values()) sup = std::max(sup, std::fabs(v));
    traj.add_row({format_double(st.time()), format_double(sup), format_double(st.h10()),
                  format_double(st.a_value()), format_double(st.companion_clock())});
  };
  record();
  double rem = 0.0;
  long nsteps = kci::detail::full_steps(0.0, horizon, dt, rem);
  for (long k = 0; k < nsteps; ++k) {
    if (!st.advance()) throw numerical_error("solution blew up at t=" + std::to_string(st.time()));
    if ((k + 1) % sample_every == 0) record();
  }
  if (rem > 0.0) {
    if (!st.advance(rem)) throw numerical_error("solution blew up at t=" + std::to_string(st.time()));
  }
  if (nsteps % sample_every != 0 || rem > 0.0) record();

  detail::ensure_out_dir(out_dir);
  write_text_file(detail::out_path(out_dir, "trajectory.csv"), traj.to_text());
  CsvTable prof;
  prof.header = {"x", "u"};
  for (int i = 0; i < g.n; ++i)
    prof.add_row({format_double(g.node(i)), format_double(st.values()[static_cast<size_t>(i)])});
  write_text_file(detail::out_path(out_dir, "final_profile.csv"), prof.to_text());

  double final_sup = 0.0;
  for (double v : st.values()) final_sup = std::max(final_sup, std::fabs(v));
  json summary{{"command", "simulate"},
               {"steps", st.steps()},
               {"final_time", st.time()},
               {"final_sup", final_sup},
               {"final_h10", st.h10()},
               {"phi", st.companion_clock()}};
  write_text_file(detail::out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  detail::write_config(r, out_dir);

  if (plot) {
    PlotData pd;
    pd.title = "final profile, t=" + format_double(st.time());
    for (int i = 0; i < g.n; ++i) pd.x.push_back(g.node(i));
    pd.series.push_back({"u", st.values()});
    emit_plot(pd, PlotKind::lines, detail::out_path(out_dir, "final_profile.svg"));
  }
  std::cout << "simulate: " << st.steps() << " steps to t=" << format_double(st.time())
            << ", sup=" << format_double(final_sup) << ", wrote " << out_dir << "\n";
  return 0;
}

inline int cmd_equilibria(const RunConfig& cfg, const std::string& out_dir, bool plot) {
  detail::Resolver r;
  double lambda = r.num("lambda", cfg.lambda, 3.0);
  double b = r.num("b", cfg.b, 1.0);
  std::string a_desc = r.str("a", cfg.a, "constant:1");
  long n = r.integer("n", cfg.n, defaults::grid_n);

  auto diffusivity = parse_diffusivity(a_desc);
  auto catalog = equilibria_catalog(lambda, b, diffusivity, static_cast<int>(n));

  detail::ensure_out_dir(out_dir);
  json records = json::array();
  for (const auto& rec : catalog) records.push_back(equilibrium_json(rec));
  write_text_file(detail::out_path(out_dir, "equilibria.json"), records.dump(2) + "\n");

  const Grid& g = catalog.front().profile.grid;
  CsvTable prof;
  prof.header = {"x"};
  for (const auto& rec : catalog) prof.header.push_back(detail::record_label(rec));
  for (int i = 0; i < g.n; ++i) {
    std::vector<std::string> row{format_double(g.node(i))};
    for (const auto& rec : catalog)
      row.push_back(format_double(rec.profile.values[static_cast<size_t>(i)]));
    prof.add_row(std::move(row));
  }
  write_text_file(detail::out_path(out_dir, "profiles.csv"), prof.to_text());

  json summary{{"command", "equilibria"}, {"lambda", lambda}, {"count", catalog.size()}};
  write_text_file(detail::out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  detail::write_config(r, out_dir);

  if (plot) {
    PlotData pd;
    pd.title = "equilibria at lambda=" + format_double(lambda);
    for (int i = 0; i < g.n; ++i) pd.x.push_back(g.node(i));
    for (const auto& rec : catalog)
      pd.series.push_back({detail::record_label(rec), rec.profile.values});
    emit_plot(pd, PlotKind::lines, detail::out_path(out_dir, "equilibria.svg"));
  }
  std::cout << "equilibria: " << catalog.size() << " records at lambda=" << format_double(lambda)
            << ", wrote " << out_dir << "\n";
  return 0;
}

inline int cmd_bifurcate(const RunConfig& cfg, const std::string& out_dir, bool plot) {
  detail::Resolver r;
  std::string grid_desc = r.str("lambda_grid", cfg.lambda_grid, "0.5:9.5:0.5");
  double b = r.num("b", cfg.b, 1.0);
  std::string a_desc = r.str("a", cfg.a, "constant:1");
  long n = r.integer("n", cfg.n, defaults::grid_n);

  auto parts = kci::detail::split_on(grid_desc, ':');
  require(parts.size() == 3, "lambda grid must be lo:hi:step");
  double lo = kci::detail::parse_number(parts[0], "lambda grid");
  double hi = kci::detail::parse_number(parts[1], "lambda grid");
  double step = kci::detail::parse_number(parts[2], "lambda grid");
  require(step > 0.0 && hi >= lo, "lambda grid needs hi >= lo and step > 0");
  std::vector<double> lambdas;
  for (double v = lo; v <= hi + 1e-9 * step; v += step) lambdas.push_back(v);
  require(lambdas.size() <= 10000, "lambda grid is too fine");

  auto diffusivity = parse_diffusivity(a_desc);
  struct Row {
    double lambda = 0.0;
    std::vector<EquilibriumRecord> records;
    std::string error;
  };
  std::vector<Row> rows(lambdas.size());
  parallel_for(static_cast<long>(lambdas.size()), [&](long i) {
    auto& row = rows[static_cast<size_t>(i)];
    row.lambda = lambdas[static_cast<size_t>(i)];
    try {
      row.records = equilibria_catalog(row.lambda, b, diffusivity, static_cast<int>(n));
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  CsvTable table;
  table.header = {"lambda", "count",  "branch_j",        "branch_sign",
                  "branch_h10", "branch_c_star", "branch_residual", "error"};
  size_t max_count = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      table.add_row({format_double(row.lambda), "0", "", "", "", "", "", row.error});
      continue;
    }
    max_count = std::max(max_count, row.records.size());
    for (const auto& rec : row.records)
      table.add_row({format_double(row.lambda), std::to_string(row.records.size()),
                     std::to_string(rec.j), std::to_string(rec.sign), format_double(rec.h10),
                     format_double(rec.c_star), format_double(rec.residual), ""});
  }
  detail::ensure_out_dir(out_dir);
  write_text_file(detail::out_path(out_dir, "bifurcation.csv"), table.to_text());
  json summary{{"command", "bifurcate"}, {"lambdas", lambdas.size()}, {"max_count", max_count}};
  write_text_file(detail::out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  detail::write_config(r, out_dir);

  if (plot) {
    PlotData pd;
    pd.title = "equilibrium count vs lambda";
    pd.x = lambdas;
    PlotSeries counts{"count", {}};
    for (const auto& row : rows)
      counts.y.push_back(row.error.empty() ? static_cast<double>(row.records.size()) : 0.0);
    pd.series.push_back(std::move(counts));
    emit_plot(pd, PlotKind::steps, detail::out_path(out_dir, "bifurcation.svg"));
  }
  std::cout << "bifurcate: " << lambdas.size() << " lambda values, max count " << max_count
            << ", wrote " << out_dir << "\n";
  return 0;
}

inline int cmd_compare(const RunConfig& cfg, const std::string& out_dir, bool plot) {
  detail::Resolver r;
  double lambda = r.num("lambda", cfg.lambda, 3.0);
  require(lambda > 0.0, "lambda must be positive");
  double b1 = r.num("b1", cfg.b1, 1.0);
  double b2 = r.num("b2", cfg.b2, 2.0);
  std::string beta_desc =
      r.str("beta", cfg.beta,
            "sinusoidal:" + format_double(b1) + "," + format_double(b2) + ",1");
  std::string a_desc = r.str("a", cfg.a, "saturating");
  long n = r.integer("n", cfg.n, defaults::grid_n);
  double dt = r.num("dt", cfg.dt, defaults::dt);
  double horizon = r.num("horizon", cfg.horizon, 10.0);
  require(horizon > 0.0, "horizon must be positive");
  double amp = r.num("amp", cfg.amp, 1.0);
  long seed = r.integer("seed", cfg.seed, 1);
  long sample_every = r.integer("sample_every", cfg.sample_every, 10);

  auto problem =
      ProblemSpec::nonlocal(parse_diffusivity(a_desc), parse_beta(beta_desc, lambda));
  Grid g = Grid::make(static_cast<int>(n));
  std::mt19937 rng(static_cast<unsigned>(seed));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Profile u1 = detail::positive_profile(g, amp, unit(rng));
  Profile u0 = u1, u2 = u1;
  for (auto& v : u0.values) v *= 0.5;
  for (auto& v : u2.values) v *= 1.5;
  u0.modes.reset();
  u2.modes.reset();

  auto rep = sandwich_run(u0, u1, u2, 0.0, horizon, problem, dt, static_cast<int>(sample_every));

  CsvTable table;
  table.header = {"t", "lower_violation", "upper_violation"};
  for (size_t i = 0; i < rep.times.size(); ++i)
    table.add_row({format_double(rep.times[i]), format_double(rep.lower_violation[i]),
                   format_double(rep.upper_violation[i])});
  detail::ensure_out_dir(out_dir);
  write_text_file(detail::out_path(out_dir, "sandwich.csv"), table.to_text());
  json summary{{"command", "compare"},
               {"max_lower_violation", rep.max_lower_violation},
               {"max_upper_violation", rep.max_upper_violation},
               {"gamma", rep.gamma},
               {"radius", rep.radius},
               {"samples", rep.samples}};
  write_text_file(detail::out_path(out_dir, "summary.json"), summary.dump(2) + "\n");
  detail::write_config(r, out_dir);

  if (plot) {
    PlotData pd;
    pd.title = "ordering violations";
    pd.x = rep.times;
    pd.series.push_back({"lower", rep.lower_violation});
    pd.series.push_back({"upper", rep.upper_violation});
    emit_plot(pd, PlotKind::lines, detail::out_path(out_dir, "sandwich.svg"));
  }
  double worst = std::max(rep.max_lower_violation, rep.max_upper_violation);
  std::cout << "compare: max ordering violation " << format_double(worst) << " over t=[0,"
            << format_double(horizon) << "], wrote " << out_dir << "\n";
  return 0;
}

inline int cmd_pullback(const RunConfig& cfg, const std::string& out_dir, bool plot) {
  detail::Resolver r;
  long j = r.integer("j", cfg.j, 1);
  long sign = r.integer("sign", cfg.sign, 1);
  double lambda = r.num("lambda", cfg.lambda, 3.0);
  double b1 = r.num("b1", cfg.b1, 1.0);
  double b2 = r.num("b2", cfg.b2, 2.0);
  std::string beta_desc =
      r.str("beta", cfg.beta,
            "sinusoidal:" + format_double(b1) + "," + format_double(b2) + ",1");
  std::string a_desc = r.str("a", cfg.a, "saturating");
  long n = r.integer("n", cfg.n, defaults::grid_n);
  long depth = r.integer("depth", cfg.depth, defaults::pullback_depth);
  double dt = r.num("dt", cfg.dt, defaults::dt);
  double window_start = r.num("window_start", cfg.window_start, 0.0);
  double window_end = r.num("window_end", cfg.window_end, 3.0);
  double sample_dt = r.num("sample_dt", cfg.sample_dt, 1.5);

  auto problem =
      ProblemSpec::nonlocal(parse_diffusivity(a_desc), parse_beta(beta_desc, lambda));
  auto trace = trace_equilibrium(static_cast<int>(j), static_cast<int>(sign), problem,
                                 window_start, window_end, sample_dt, static_cast<int>(n),
                                 static_cast<int>(depth), dt);

  detail::ensure_out_dir(out_dir);
  write_text_file(detail::out_path(out_dir, "region.json"), region_json(trace.region).dump(2) + "\n");
  write_text_file(detail::out_path(out_dir, "trace.json"), trace_json(trace).dump(2) + "\n");

  const int P = trace.region.arch_stride();
  const int m = P - 1;
  CsvTable table;
  table.header = {"t", "gap", "converged", "zeros"};
  for (long a = 0; a < j; ++a) {
    table.header.push_back("arch" + std::to_string(a) + "_min");
    table.header.push_back("arch" + std::to_string(a) + "_max");
  }
  for (const auto& s : trace.samples) {
    std::string zeros;
    for (size_t k = 0; k < s.zeros.size(); ++k)
      zeros += (k ? ";" : "") + format_double(s.zeros[k]);
    std::vector<std::string> row{format_double(s.t), format_double(s.run.final_gap()),
                                 s.run.converged ? "1" : "0", zeros};
    const auto& v = s.run.final_slice().values;
    for (long a = 0; a < j; ++a) {
      double lo = v[static_cast<size_t>(a * P)], hi = lo;
      for (int q = 0; q < m; ++q) {
        double w = v[static_cast<size_t>(a * P + q)];
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
      row.push_back(format_double(lo));
      row.push_back(format_double(hi));
    }
    table.add_row(std::move(row));
  }
  write_text_file(detail::out_path(out_dir, "trace.csv"), table.to_text());
  detail::write_config(r, out_dir);

  if (plot) {
    const Grid& g = trace.region.lower.grid;
    PlotData pd;
    pd.title = "pullback slices in the invariant region";
    for (int i = 0; i < g.n; ++i) pd.x.push_back(g.node(i));
    pd.band_lower = trace.region.lower.values;
    pd.band_upper = trace.region.upper.values;
    for (const auto& s : trace.samples)
      pd.series.push_back({"t=" + format_double(s.t), s.run.final_slice().values});
    emit_plot(pd, PlotKind::band, detail::out_path(out_dir, "pullback.svg"));
  }
  std::cout << "pullback: " << trace.samples.size() << " samples, "
            << (trace.valid ? "valid trace" : "invalid trace: " + trace.failure_reason)
            << ", wrote " << out_dir << "\n";
  return trace.valid ? 0 : 2;
}

inline int cmd_verify(const RunConfig& cfg, const std::string& out_dir, bool /*plot*/) {
  detail::Resolver r;
  std::string suite = r.str("suite", cfg.suite, "all");
  long seed = r.integer("seed", cfg.seed, 7);
  long cases = r.integer("cases", cfg.cases, 20);
  require(cases >= 1, "cases must be at least 1");
  long n = r.integer("n", cfg.n, 63);
  double horizon = r.num("horizon", cfg.horizon, 5.0);
  require(horizon > 0.0, "horizon must be positive");
  double dt = r.num("dt", cfg.dt, defaults::dt);

  const bool all = suite == "all";
  require(all || suite == "sandwich" || suite == "invariance" || suite == "coercivity" ||
              suite == "equivalence",
          "unknown suite '" + suite +
              "' (known: sandwich, invariance, coercivity, equivalence, all)");

  Grid g = Grid::make(static_cast<int>(n));
  json results = json::array();
  bool pass = true;
  auto push = [&](const std::string& name, long ncases, double violation, double tol) {
    bool ok = violation <= tol;
    pass = pass && ok;
    results.push_back(json{{"name", name},
                           {"cases", ncases},
                           {"max_violation", violation},
                           {"tol", tol},
                           {"pass", ok}});
  };

  if (all || suite == "sandwich") {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    const double lams[3] = {3.0, 5.0, 9.0};
    for (long i = 0; i < cases; ++i) {
      double lambda = lams[i % 3];
      double b1 = 1.0 + 0.5 * unit(rng);
      double b2 = b1 + 0.5 + unit(rng);
      double omega = 0.5 + 1.5 * unit(rng);
      double amp = 0.5 + unit(rng);
      double wiggle = 2.0 * unit(rng) - 1.0;
      auto a = (i % 2 == 0) ? diffusivity_saturating() : diffusivity_rational();
      auto problem =
          ProblemSpec::nonlocal(std::move(a), ForcingSpec::sinusoidal(lambda, b1, b2, omega));
      Profile u1 = detail::positive_profile(g, amp, wiggle);
      Profile u0 = u1, u2 = u1;
      double down = 0.1 + 0.8 * unit(rng), up = 1.1 + 0.8 * unit(rng);
      for (auto& v : u0.values) v *= down;
      for (auto& v : u2.values) v *= up;
      u0.modes.reset();
      u2.modes.reset();
      auto rep = sandwich_run(u0, u1, u2, 0.0, horizon, problem, dt, 50);
      worst = std::max({worst, rep.max_lower_violation, rep.max_upper_violation});
    }
    push("sandwich", cases, worst, 1e-6);
  }

  if (all || suite == "invariance") {
    auto spec = region_spec(1, +1, 3.0, 1.0, 2.0, static_cast<int>(n));
    auto problem = ProblemSpec::nonlocal(diffusivity_saturating(),
                                         ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
    auto rep = invariance_test(spec, problem, 0.0, horizon, 5, static_cast<unsigned>(seed), dt);
    double worst = std::max({rep.max_exit, rep.max_symmetry_drift, rep.max_sign_violation});
    push("invariance", 5, worst, 1e-6);
  }

  if (all || suite == "coercivity") {
    std::mt19937 rng(static_cast<unsigned>(seed) + 1);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto a = diffusivity_saturating();
    const double lambda = 3.0, b = 1.0;
    const double floor = -lambda * lambda * std::numbers::pi / (4.0 * b);
    long ncases = 10 * cases;
    double worst = 0.0;
    for (long i = 0; i < ncases; ++i) {
      Profile u = Profile::from_function(g, [&](double x) {
        double s = 0.0;
        for (int k = 1; k <= 8; ++k) s += 4.0 * unit(rng) / k * std::sin(k * x);
        return s;
      });
      double e = energy(u, 1, lambda, b, a);
      double s_val = h10_norm_sq(u);
      worst = std::max(worst, (floor + 0.5 * s_val) - e);
    }
    push("coercivity", ncases, worst, 1e-9);
  }

  if (all || suite == "equivalence") {
    Profile u0 = Profile::from_function(g, [](double x) { return 0.5 * std::sin(x); });
    auto problem = ProblemSpec::nonlocal(diffusivity_rational(),
                                         ForcingSpec::sinusoidal(3.0, 1.0, 2.0, 1.0));
    auto rep = check_equivalence_timechange(u0, 0.0, 3.0, dt, problem, 10);
    push("equivalence", static_cast<long>(rep.sample_times.size()), rep.max_discrepancy, 5e-3);
  }

  detail::ensure_out_dir(out_dir);
  json report{{"command", "verify"}, {"suite", suite}, {"seed", seed}, {"results", results},
              {"pass", pass}};
  write_text_file(detail::out_path(out_dir, "report.json"), report.dump(2) + "\n");
  detail::write_config(r, out_dir);
  std::cout << "verify: " << suite << " -> " << (pass ? "pass" : "fail") << " ("
            << results.size() << " checks), wrote " << out_dir << "\n";
  return pass ? 0 : 3;
}

// One subcommand per run; JSON config plus flag overrides; exit codes:
// 0 success, 1 bad arguments, 2 numerical failure, 3 failed property check.
inline int run(std::vector<std::string> args) {
  CLI::App app{"toolkit for u_t = a(|u_x|^2) u_xx + lambda u - beta(t) u^3 on (0, pi)"};
  app.require_subcommand(1);

  struct Flags {
    RunConfig over;
    std::string config, out = "out";
    bool plot = false;
  } fl;

  auto add_common = [&fl](CLI::App* sub) {
    sub->add_option("--config", fl.config, "JSON config file; flags override its values");
    sub->add_option("--lambda", fl.over.lambda, "linear coefficient");
    sub->add_option("--b", fl.over.b, "constant damping coefficient");
    sub->add_option("--b1", fl.over.b1, "lower damping bound");
    sub->add_option("--b2", fl.over.b2, "upper damping bound");
    sub->add_option("--beta", fl.over.beta,
                    "damping descriptor: constant:b | sinusoidal:b1,b2,omega | table:t,v;t,v;...");
    sub->add_option("--a", fl.over.a,
                    "diffusivity descriptor: constant:c | saturating | rational");
    sub->add_option("--n", fl.over.n, "interior grid nodes");
    sub->add_option("--dt", fl.over.dt, "time step");
    sub->add_option("--horizon", fl.over.horizon, "integration horizon");
    sub->add_option("--amp", fl.over.amp, "initial data amplitude");
    sub->add_option("--seed", fl.over.seed, "random seed");
    sub->add_option("--sample-every", fl.over.sample_every, "steps between samples");
    sub->add_option("--j", fl.over.j, "number of arches");
    sub->add_option("--sign", fl.over.sign, "+1 or -1 branch");
    sub->add_option("--depth", fl.over.depth, "pullback depth");
    sub->add_option("--window-start", fl.over.window_start, "trace window start");
    sub->add_option("--window-end", fl.over.window_end, "trace window end");
    sub->add_option("--sample-dt", fl.over.sample_dt, "trace sample spacing");
    sub->add_option("--lambda-grid", fl.over.lambda_grid, "lambda sweep lo:hi:step");
    sub->add_option("--suite", fl.over.suite, "verify suite");
    sub->add_option("--cases", fl.over.cases, "verify case count");
    sub->add_option("--out", fl.out, "output directory");
    sub->add_flag("--plot", fl.plot, "emit SVG plots");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "evolve one trajectory");
  CLI::App* equilibria = app.add_subcommand("equilibria", "catalog equilibria at one lambda");
  CLI::App* bifurcate = app.add_subcommand("bifurcate", "equilibrium counts over a lambda sweep");
  CLI::App* compare = app.add_subcommand("compare", "order-preserving sandwich run");
  CLI::App* pullback = app.add_subcommand("pullback", "trace a non-autonomous equilibrium");
  CLI::App* verify = app.add_subcommand("verify", "run a property suite");
  for (CLI::App* sub : {simulate, equilibria, bifurcate, compare, pullback, verify})
    add_common(sub);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    RunConfig base;
    if (!fl.config.empty()) base = parse_config_json(read_text_file(fl.config));
    RunConfig cfg = merge_overrides(base, fl.over);
    bool plot = fl.plot || cfg.plot.value_or(false);
    if (*simulate) return cmd_simulate(cfg, fl.out, plot);
    if (*equilibria) return cmd_equilibria(cfg, fl.out, plot);
    if (*bifurcate) return cmd_bifurcate(cfg, fl.out, plot);
    if (*compare) return cmd_compare(cfg, fl.out, plot);
    if (*pullback) return cmd_pullback(cfg, fl.out, plot);
    if (*verify) return cmd_verify(cfg, fl.out, plot);
    std::cerr << "error: no subcommand\n" << app.help();
    return 1;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace kci::cli
