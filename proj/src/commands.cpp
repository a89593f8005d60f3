#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "io.hpp"

namespace oulab {

using nlohmann::json;

namespace {

// Exit statuses (stable contract): 0 pass, 1 check failed, 2 config error,
// 3 runtime divergence.
constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;
constexpr int kDiverged = 3;

json error_json(const std::string& cmd, const std::string& msg) {
  return json{{"command", cmd}, {"error", msg}};
}

// Wraps builder/runtime validation errors into a config-error result.
template <typename Fn>
CommandResult guarded(const std::string& cmd, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return {kConfigError, error_json(cmd, e.what())};
  } catch (const std::invalid_argument& e) {
    return {kConfigError, error_json(cmd, e.what())};
  } catch (const std::domain_error& e) {
    return {kConfigError, error_json(cmd, e.what())};
  }
}

json constants_json(const ConstantsReport& c) {
  return json{{"valid", c.valid}, {"M_f", c.M_f},     {"M_d", c.M_d},
              {"alpha", c.alpha}, {"K_A2", c.K_A2},   {"K_A3", c.K_A3},
              {"K_A4", c.K_A4}};
}

json check_report_json(const CheckReport& r) {
  json residuals = json::array();
  for (const auto& [n, res] : r.residuals) residuals.push_back(json::array({n, res}));
  return json{{"name", r.name},
              {"residuals", residuals},
              {"observed_order", r.observed_order},
              {"terminal_residual", r.terminal_residual},
              {"tolerance", r.tolerance},
              {"below_floor", r.below_floor},
              {"adversarial_min_slack", r.adversarial_min_slack},
              {"pass", r.pass},
              {"detail", r.detail}};
}

bool f_zero_declared(const RunConfig& cfg) {
  return cfg.get_string("weight.mode", "weighted") == "unweighted";
}

}  // namespace

Schedule schedule_from_config(const RunConfig& cfg, const std::string& prefix,
                              double horizon) {
  std::string kind_str = cfg.get_string(prefix + ".kind");
  std::vector<double> params = cfg.get_list(prefix + ".params");
  try {
    switch (schedule_kind_from_string(kind_str)) {
      case ScheduleKind::Constant:
        if (params.size() != 1)
          throw std::invalid_argument("constant schedule takes one parameter");
        return Schedule::constant(params[0], horizon);
      case ScheduleKind::Linear:
        if (params.size() != 2)
          throw std::invalid_argument("linear schedule takes two parameters");
        return Schedule::linear(params[0], params[1], horizon);
      case ScheduleKind::Polynomial:
        return Schedule::polynomial(params, horizon);
      case ScheduleKind::SqrtPolynomial:
        return Schedule::sqrt_polynomial(params, horizon);
      case ScheduleKind::PiecewiseConstant: {
        // params alternate value, break, value, ..., value
        if (params.size() % 2 == 0)
          throw std::invalid_argument(
              "piecewise-constant params must alternate value,break,...,value");
        std::vector<double> values, breaks;
        for (size_t i = 0; i < params.size(); ++i)
          (i % 2 == 0 ? values : breaks).push_back(params[i]);
        return Schedule::piecewise_constant(values, breaks, horizon);
      }
      case ScheduleKind::Tabulated: {
        if (params.size() < 4 || params.size() % 2 != 0)
          throw std::invalid_argument("tabulated params must be t0,v0,t1,v1,...");
        std::vector<double> times, values;
        for (size_t i = 0; i < params.size(); i += 2) {
          times.push_back(params[i]);
          values.push_back(params[i + 1]);
        }
        return Schedule::tabulated(times, values, horizon);
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + prefix + "': " + e.what());
  }
  throw ConfigError("key '" + prefix + ".kind': unknown kind");
}

CoefficientSchedule coefficients_from_config(const RunConfig& cfg) {
  double T = cfg.get_double("coeff.T");
  if (!(T > 0.0)) throw ConfigError("key 'coeff.T': must be positive");
  Schedule f = schedule_from_config(cfg, "coeff.f", T);
  Schedule g = schedule_from_config(cfg, "coeff.g", T);
  try {
    CoefficientSchedule s(std::move(f), std::move(g));
    if (f_zero_declared(cfg) && !s.f_is_zero())
      throw ConfigError("weight.mode = unweighted requires f == 0");
    return s;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("coefficient schedule: ") + e.what());
  }
}

WeightParam weight_from_config(const RunConfig& cfg) {
  std::string mode = cfg.get_string("weight.mode", "weighted");
  if (mode == "unweighted") return WeightParam::unit();
  if (mode != "weighted")
    throw ConfigError("key 'weight.mode': expected 'weighted' or 'unweighted'");
  double c = cfg.get_double("weight.c");
  if (!(c > 0.0)) throw ConfigError("key 'weight.c': must be positive");
  return WeightParam::weighted(c);
}

GridPtr grid_from_config(const RunConfig& cfg) {
  int d = static_cast<int>(cfg.get_int("grid.d"));
  double L = cfg.get_double("grid.L");
  int n = static_cast<int>(cfg.get_int("grid.n"));
  try {
    return make_grid(d, L, n, weight_from_config(cfg));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

GaussianState init_from_config(const RunConfig& cfg, int dim) {
  std::string kind = cfg.get_string("init.kind", "gaussian");
  if (kind != "gaussian") throw ConfigError("key 'init.kind': only 'gaussian' supported");
  GaussianState g0;
  g0.dim = dim;
  g0.variance = cfg.get_double("init.variance");
  if (!(g0.variance > 0.0)) throw ConfigError("key 'init.variance': must be positive");
  std::vector<double> mean = cfg.get_list("init.mean", std::vector<double>(dim, 0.0));
  if (mean.size() != static_cast<size_t>(dim))
    throw ConfigError("key 'init.mean': needs grid.d entries");
  for (int a = 0; a < dim; ++a) g0.mean[static_cast<size_t>(a)] = mean[static_cast<size_t>(a)];
  return g0;
}

SolverConfig solver_from_config(const RunConfig& cfg, bool needs_seed) {
  SolverConfig sc;
  sc.dt = cfg.get_double("solver.dt");
  if (!(sc.dt > 0.0)) throw ConfigError("key 'solver.dt': must be positive");
  double coeff_T = cfg.get_double("coeff.T");
  sc.horizon = cfg.get_double("solver.T", coeff_T);
  if (!(sc.horizon > 0.0 && sc.horizon <= coeff_T))
    throw ConfigError("key 'solver.T': must lie in (0, coeff.T]");
  std::string scheme = cfg.get_string("solver.scheme", "semi-implicit");
  if (scheme == "semi-implicit") sc.scheme = Scheme::SemiImplicit;
  else if (scheme == "explicit") sc.scheme = Scheme::Explicit;
  else throw ConfigError("key 'solver.scheme': expected 'semi-implicit' or 'explicit'");
  sc.checkpoint_every = static_cast<int>(cfg.get_int("solver.checkpoint_every", 100));
  if (sc.checkpoint_every < 1)
    throw ConfigError("key 'solver.checkpoint_every': must be at least 1");
  sc.n_paths = static_cast<int>(cfg.get_int("run.n_paths", 1));
  if (sc.n_paths < 1) throw ConfigError("key 'run.n_paths': must be at least 1");
  if (needs_seed && !cfg.has("run.seed"))
    throw ConfigError("missing required key 'run.seed' (stochastic command)");
  sc.seed = cfg.has("run.seed") ? cfg.get_uint64("run.seed") : 0;
  return sc;
}

BatterySettings battery_from_config(const RunConfig& cfg) {
  BatterySettings b;
  b.dim = static_cast<int>(cfg.get_int("grid.d"));
  b.half_width = cfg.get_double("grid.L");
  b.weight = weight_from_config(cfg);
  std::vector<double> levels =
      cfg.get_list("verify.levels", std::vector<double>{129, 257, 513});
  b.levels.clear();
  for (double v : levels) b.levels.push_back(static_cast<int>(v));
  if (b.levels.size() < 3)
    throw ConfigError("key 'verify.levels': need at least 3 refinement levels");
  b.family_count = static_cast<int>(cfg.get_int("verify.family_count", 50));
  if (b.family_count < 1)
    throw ConfigError("key 'verify.family_count': must be at least 1");
  if (!cfg.has("run.seed"))
    throw ConfigError("missing required key 'run.seed' (stochastic command)");
  b.seed = cfg.get_uint64("run.seed");
  double T = cfg.get_double("coeff.T");
  b.t = cfg.get_double("verify.t", 0.5 * T);
  if (!(b.t >= 0.0 && b.t <= T)) throw ConfigError("key 'verify.t': outside [0, T]");
  b.adversarial_iters = static_cast<int>(cfg.get_int("verify.adversarial_iters", 200));
  return b;
}

namespace {

struct NoiseBundle {
  bool active = false;
  QWienerSpec spec;
  Schedule b = Schedule::constant(0.0, 1.0);
  Schedule h = Schedule::constant(1.0, 1.0);
};

NoiseBundle noise_from_config(const RunConfig& cfg, GridPtr grid, double horizon) {
  NoiseBundle nb;
  int modes = static_cast<int>(cfg.get_int("noise.modes", 0));
  if (modes < 0) throw ConfigError("key 'noise.modes': must be nonnegative");
  if (modes == 0) return nb;
  double q0 = cfg.get_double("noise.q0", 0.01);
  double decay = cfg.get_double("noise.decay", 2.0);
  if (!(decay > 1.0))
    throw ConfigError("key 'noise.decay': must exceed 1 (trace-class spectrum)");
  try {
    nb.spec = QWienerSpec::sine_basis(grid, modes, q0, decay);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  nb.b = schedule_from_config(cfg, "noise.b", horizon);
  nb.h = schedule_from_config(cfg, "noise.h", horizon);
  nb.active = true;
  return nb;
}

bool noise_requested(const RunConfig& cfg) {
  return cfg.get_int("noise.modes", 0) > 0;
}

}  // namespace

CommandResult cmd_check(const RunConfig& cfg, const std::string& out_dir) {
  return guarded("check", [&]() -> CommandResult {
    CoefficientSchedule s = coefficients_from_config(cfg);
    WeightParam w = weight_from_config(cfg);
    int dim = static_cast<int>(cfg.get_int("grid.d", 1));
    ConditionReport cond = check_condition(s, w);
    double min_c = minimal_c(s);
    ConstantsReport consts = constants_report(s, w, dim);
    bool f_zero = s.f_is_zero();
    bool ok = cond.holds || (w.unweighted && f_zero);

    json j{{"command", "check"},
           {"holds", cond.holds},
           {"min_slack", cond.min_slack},
           {"argmin_t", cond.argmin_t},
           {"f_zero_mode", w.unweighted && f_zero},
           {"constants", constants_json(consts)},
           {"pass", ok}};
    if (std::isinf(min_c)) j["minimal_c"] = "inf";
    else j["minimal_c"] = min_c;

    io::ensure_dir(out_dir);
    io::write_json(out_dir + "/check.json", j);
    return {ok ? kPass : kCheckFailed, j};
  });
}

CommandResult cmd_verify(const RunConfig& cfg, const std::string& out_dir) {
  return guarded("verify", [&]() -> CommandResult {
    CoefficientSchedule s = coefficients_from_config(cfg);
    BatterySettings settings = battery_from_config(cfg);
    std::vector<CheckReport> reports = run_battery(s, settings);

    io::ensure_dir(out_dir);
    bool all_pass = true;
    json list = json::array();
    for (const auto& r : reports) {
      json jr = check_report_json(r);
      io::write_json(out_dir + "/check_" + r.name + ".json", jr);
      list.push_back(json{{"name", r.name}, {"pass", r.pass}});
      all_pass = all_pass && r.pass;
    }
    json j{{"command", "verify"}, {"checks", list}, {"pass", all_pass}};
    return {all_pass ? kPass : kCheckFailed, j};
  });
}

CommandResult cmd_solve(const RunConfig& cfg, const std::string& out_dir) {
  return guarded("solve", [&]() -> CommandResult {
    GridPtr grid = grid_from_config(cfg);
    CoefficientSchedule s = coefficients_from_config(cfg);
    bool with_noise = noise_requested(cfg);
    SolverConfig sc = solver_from_config(cfg, with_noise);
    NoiseBundle nb = noise_from_config(cfg, grid, s.horizon);
    GaussianState g0 = init_from_config(cfg, grid->dim());
    GridFunction u0 = density_on_grid(g0, grid);

    io::ensure_dir(out_dir);

    // The Hilbert-Schmidt bound |B(t)| <= h(t) is a precondition of the run;
    // reject the configuration before any stepping.
    if (nb.active) {
      for (int i = 0; i <= 100; ++i) {
        double t = sc.horizon * i / 100.0;
        HsNormCheck hc = hs_norm_bound_check(nb.spec, nb.b, nb.h, t);
        if (!hc.ok) {
          json j{{"command", "solve"},
                 {"error", "noise bound violated: |B| exceeds h(t)"},
                 {"t", t},
                 {"norm", hc.norm},
                 {"bound", hc.bound},
                 {"pass", false}};
          io::write_json(out_dir + "/stats.json", j);
          return {kCheckFailed, j};
        }
      }
    }

    NoiseSetup ns;
    if (nb.active) {
      ns.spec = &nb.spec;
      ns.b = &nb.b;
    }
    Trajectory traj;
    try {
      traj = solve(u0, sc, s, ns);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    char name[64];
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
      std::snprintf(name, sizeof name, "/snapshot_%08zu.csv", traj.snapshot_steps[i]);
      io::write_file(out_dir + name, io::snapshot_csv(traj.snapshots[i]));
    }
    io::write_file(out_dir + "/energy.csv", io::energy_csv(traj.energy));

    if (traj.diverged) {
      json j{{"command", "solve"},
             {"diverged", true},
             {"diverged_step", traj.diverged_step},
             {"last_good_step", traj.snapshot_steps.empty() ? 0 : traj.snapshot_steps.back()},
             {"pass", false}};
      io::write_json(out_dir + "/stats.json", j);
      return {kDiverged, j};
    }

    double mass0 = integral(traj.snapshots.front());
    double massT = integral(traj.snapshots.back());
    bool bound_ok = true;
    for (const auto& row : traj.energy)
      if (row.h_norm_sq > row.bound * (1.0 + 1e-6) + 1e-12) bound_ok = false;
    double final_h_norm = std::sqrt(traj.energy.back().h_norm_sq);

    // Single noisy paths fluctuate around the expectation-level bound, so the
    // bound gates the exit status only for deterministic runs.
    bool gate = nb.active ? true : bound_ok;
    json j{{"command", "solve"},
           {"final_H_norm", final_h_norm},
           {"mass_drift", std::abs(massT - mass0)},
           {"bound_satisfied", bound_ok},
           {"diverged", false},
           {"steps", traj.snapshot_steps.back()},
           {"K_A3", traj.K_A3},
           {"stochastic", nb.active},
           {"pass", gate}};
    io::write_json(out_dir + "/stats.json", j);
    return {gate ? kPass : kCheckFailed, j};
  });
}

CommandResult cmd_ensemble(const RunConfig& cfg, const std::string& out_dir) {
  return guarded("ensemble", [&]() -> CommandResult {
    GridPtr grid = grid_from_config(cfg);
    CoefficientSchedule s = coefficients_from_config(cfg);
    SolverConfig sc = solver_from_config(cfg, true);
    if (sc.n_paths < 2) throw ConfigError("key 'run.n_paths': ensemble needs >= 2");
    NoiseBundle nb = noise_from_config(cfg, grid, s.horizon);
    GaussianState g0 = init_from_config(cfg, grid->dim());
    GridFunction u0 = density_on_grid(g0, grid);

    io::ensure_dir(out_dir);
    if (nb.active) {
      for (int i = 0; i <= 100; ++i) {
        double t = sc.horizon * i / 100.0;
        HsNormCheck hc = hs_norm_bound_check(nb.spec, nb.b, nb.h, t);
        if (!hc.ok) {
          json j{{"command", "ensemble"},
                 {"error", "noise bound violated: |B| exceeds h(t)"},
                 {"t", t}, {"norm", hc.norm}, {"bound", hc.bound}, {"pass", false}};
          io::write_json(out_dir + "/ensemble_stats.json", j);
          return {kCheckFailed, j};
        }
      }
    }

    NoiseSetup ns;
    if (nb.active) {
      ns.spec = &nb.spec;
      ns.b = &nb.b;
    }
    EnsembleStats stats;
    try {
      stats = solve_ensemble(u0, sc, s, ns);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }

    io::write_file(out_dir + "/mean_final.csv", io::snapshot_csv(stats.mean.back()));
    std::ostringstream csv;
    csv << "t,second_moment_norm,se,bound\n";
    bool bound_ok = true;
    for (size_t r = 0; r < stats.times.size(); ++r) {
      csv << io::fmt17(stats.times[r]) << ',' << io::fmt17(stats.second_moment_norm[r])
          << ',' << io::fmt17(stats.second_moment_se[r]) << ','
          << io::fmt17(stats.bound[r]) << '\n';
      if (stats.second_moment_norm[r] >
          stats.bound[r] * (1.0 + 1e-6) + 3.0 * stats.second_moment_se[r])
        bound_ok = false;
    }
    io::write_file(out_dir + "/ensemble.csv", csv.str());

    json j{{"command", "ensemble"},
           {"n_paths", stats.n_paths},
           {"final_second_moment", stats.second_moment_norm.back()},
           {"final_se", stats.second_moment_se.back()},
           {"final_bound", stats.bound.back()},
           {"bound_satisfied", bound_ok},
           {"pass", bound_ok}};
    io::write_json(out_dir + "/ensemble_stats.json", j);
    return {bound_ok ? kPass : kCheckFailed, j};
  });
}

CommandResult cmd_oracle_compare(const RunConfig& cfg, const std::string& out_dir) {
  return guarded("oracle-compare", [&]() -> CommandResult {
    GridPtr grid = grid_from_config(cfg);
    CoefficientSchedule s = coefficients_from_config(cfg);
    SolverConfig sc = solver_from_config(cfg, true);
    GaussianState g0 = init_from_config(cfg, grid->dim());
    GridFunction u0 = density_on_grid(g0, grid);

    long n_particles = cfg.get_int("particles.n", 100000);
    double p_dt = cfg.get_double("particles.dt", 1e-3);

    Trajectory traj;
    try {
      traj = solve(u0, sc, s, {});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (traj.diverged) {
      json j{{"command", "oracle-compare"}, {"diverged", true}, {"pass", false}};
      io::ensure_dir(out_dir);
      io::write_json(out_dir + "/oracle_compare.json", j);
      return {kDiverged, j};
    }
    const GridFunction& u_solver = traj.snapshots.back();

    GaussianState gT = evolve_moments(g0, s, sc.horizon);
    GridFunction u_oracle = density_on_grid(gT, grid);

    GridFunction u_particles =
        particle_forward_sde(g0, s, grid, n_particles, p_dt, sc.seed);

    auto variance_of = [&](const GridFunction& u) {
      const auto& g = *u.grid();
      double mass = integral(u);
      if (mass <= 0.0) return 0.0;
      double var = 0.0;
      double x[3];
      for (int a = 0; a < g.dim(); ++a) {
        double m1 = 0.0, m2 = 0.0;
        for (size_t i = 0; i < u.size(); ++i) {
          g.coords(i, x);
          m1 += g.quad_weight(i) * x[a] * u[i];
          m2 += g.quad_weight(i) * x[a] * x[a] * u[i];
        }
        m1 /= mass;
        var += m2 / mass - m1 * m1;
      }
      return var / g.dim();
    };

    json j{{"command", "oracle-compare"},
           {"oracle_variance", gT.variance},
           {"solver_variance", variance_of(u_solver)},
           {"particle_variance", variance_of(u_particles)},
           {"l1", compare_densities(u_solver, u_particles, DensityNorm::L1)},
           {"l2", compare_densities(u_solver, u_particles, DensityNorm::L2)},
           {"linf", compare_densities(u_solver, u_particles, DensityNorm::Linf)},
           {"oracle_solver_linf",
            compare_densities(u_solver, u_oracle, DensityNorm::Linf)},
           {"pass", true}};
    io::ensure_dir(out_dir);
    io::write_json(out_dir + "/oracle_compare.json", j);
    return {kPass, j};
  });
}

CommandResult cmd_report(const std::string& out_dir) {
  try {
    json reports = json::array();
    bool all_pass = true;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(out_dir))
      if (entry.path().extension() == ".json" &&
          entry.path().filename() != "summary.json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      std::ifstream in(p);
      json j = json::parse(in, nullptr, true);
      json item{{"file", p.filename().string()}};
      if (j.contains("pass")) {
        item["pass"] = j["pass"];
        if (j["pass"].is_boolean() && !j["pass"].get<bool>()) all_pass = false;
      }
      if (j.contains("name")) item["name"] = j["name"];
      if (j.contains("command")) item["command"] = j["command"];
      reports.push_back(item);
    }
    json summary{{"command", "report"}, {"reports", reports}, {"pass", all_pass}};
    io::write_json(out_dir + "/summary.json", summary);
    return {all_pass ? kPass : kCheckFailed, summary};
  } catch (const std::exception& e) {
    return {kConfigError, error_json("report", e.what())};
  }
}

}  // namespace oulab
