#include "solver.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace oulab {

namespace {

constexpr double kDivergenceCeiling = 1e12;

template <typename Fn>
void for_each_line(const WeightedGrid& g, int axis, Fn&& fn) {
  const int n = g.points_per_axis();
  const size_t stride = g.stride(axis);
  const size_t line_span = stride * static_cast<size_t>(n);
  for (size_t block = 0; block < g.size(); block += line_span)
    for (size_t off = 0; off < stride; ++off) fn(block + off, stride);
}

// Solves (I - a * Lap_axis) x = rhs along one axis for every line, Dirichlet
// boundary (unknowns are the n-2 interior nodes). Constant-coefficient
// Thomas elimination; scratch buffers reused across lines.
void implicit_axis_sweep(GridFunction& u, int axis, double a) {
  const auto& g = *u.grid();
  const int m = g.points_per_axis() - 2;
  const double diag = 1.0 + 2.0 * a;
  std::vector<double> cp(static_cast<size_t>(m)), dp(static_cast<size_t>(m));
  for_each_line(g, axis, [&](size_t base, size_t s) {
    auto idx = [&](int i) { return base + s * static_cast<size_t>(i); };
    cp[0] = -a / diag;
    dp[0] = u[idx(1)] / diag;
    for (int i = 1; i < m; ++i) {
      double denom = diag + a * cp[static_cast<size_t>(i - 1)];
      cp[static_cast<size_t>(i)] = -a / denom;
      dp[static_cast<size_t>(i)] =
          (u[idx(i + 1)] + a * dp[static_cast<size_t>(i - 1)]) / denom;
    }
    double prev = dp[static_cast<size_t>(m - 1)];
    u[idx(m)] = prev;
    for (int i = m - 2; i >= 0; --i) {
      prev = dp[static_cast<size_t>(i)] - cp[static_cast<size_t>(i)] * prev;
      u[idx(i + 1)] = prev;
    }
    u[idx(0)] = 0.0;
    u[idx(m + 1)] = 0.0;
  });
}

void check_finite(const GridFunction& u, size_t step_index, double t) {
  for (size_t i = 0; i < u.size(); ++i) {
    double v = u[i];
    if (!std::isfinite(v) || std::abs(v) > kDivergenceCeiling)
      throw DivergenceError(step_index, t);
  }
}

double g2_max(const CoefficientSchedule& s) {
  double m = 0.0;
  const int n = 1000;
  for (int i = 0; i < n; ++i)
    m = std::max(m, s.g_squared(s.horizon * static_cast<double>(i) / (n - 1)));
  return m;
}

}  // namespace

GridFunction step(const GridFunction& u, double t, const SolverConfig& cfg,
                  const CoefficientSchedule& s, const NoiseIncrement* noise) {
  const auto& g = *u.grid();
  const double dt = noise ? noise->dt : cfg.dt;

  if (cfg.scheme == Scheme::Explicit) {
    // Forward Euler-Maruyama, coefficients at the left endpoint.
    GridFunction au = apply_A(t, u, s);
    GridFunction out = GridFunction::zeros(u.grid());
    for (size_t i = 0; i < out.size(); ++i) {
      double v = u[i] + dt * au[i];
      if (noise) v += noise->values[i];
      out[i] = g.is_boundary(i) ? 0.0 : v;
    }
    return out;
  }

  // Semi-implicit: explicit drift and noise in the right-hand side,
  // diffusion factored into per-axis tridiagonal solves.
  const double tm = t + 0.5 * dt;
  const double f = s.f(tm);
  const double nu = 0.5 * s.g_squared(tm);
  GridFunction drift = flux_divergence_xv(u);
  GridFunction rhs = GridFunction::zeros(u.grid());
  for (size_t i = 0; i < rhs.size(); ++i) {
    double v = u[i] + dt * f * drift[i];
    if (noise) v += noise->values[i];
    rhs[i] = g.is_boundary(i) ? 0.0 : v;
  }
  const double a = dt * nu / (g.spacing() * g.spacing());
  for (int axis = 0; axis < g.dim(); ++axis) implicit_axis_sweep(rhs, axis, a);
  return rhs;
}

namespace {

struct StepPlan {
  size_t n_steps;
  double dt;
  double horizon;
  double step_dt(size_t k) const {
    double t = static_cast<double>(k) * dt;
    return std::min(dt, horizon - t);
  }
  double step_t(size_t k) const { return static_cast<double>(k) * dt; }
};

StepPlan make_plan(const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("solver dt must be positive");
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("solver horizon must be positive");
  size_t n = static_cast<size_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
  return StepPlan{n, cfg.dt, cfg.horizon};
}

void validate_run(const GridFunction& u0, const SolverConfig& cfg,
                  const CoefficientSchedule& s) {
  const auto& wp = u0.grid()->weight_param();
  if (cfg.checkpoint_every < 1)
    throw std::invalid_argument("checkpoint_every must be at least 1");
  if (!wp.unweighted && !check_condition(s, wp).holds)
    throw std::invalid_argument(
        "condition f - g^2/(2c) >= 0 fails; use the unweighted mode only for f == 0");
  if (wp.unweighted && !s.f_is_zero())
    throw std::invalid_argument("unweighted mode requires f == 0");
  if (!std::isfinite(weighted_l2_norm_sq(u0)))
    throw std::invalid_argument("initial state has infinite weighted norm");
  if (cfg.scheme == Scheme::Explicit) {
    double h = u0.grid()->spacing();
    double limit = h * h / (g2_max(s) * u0.grid()->dim());
    if (cfg.dt > limit)
      throw std::invalid_argument("explicit scheme unstable: dt > h^2/(g2_max*d)");
  }
}

// Core loop shared by solve / ensemble / restore. The observer fires at step 0
// (initial state) and after every recorded step.
template <typename Observer>
void integrate(GridFunction u, const SolverConfig& cfg, const CoefficientSchedule& s,
               const NoiseSetup& noise, std::uint64_t path, size_t first_step,
               Observer&& observe) {
  StepPlan plan = make_plan(cfg);
  observe(first_step, plan.step_t(first_step), u);
  for (size_t k = first_step; k < plan.n_steps; ++k) {
    double t = plan.step_t(k);
    double dt_k = plan.step_dt(k);
    std::optional<NoiseIncrement> inc;
    if (noise.active())
      inc = sample_increment(*noise.spec, t, dt_k, *noise.b, cfg.seed, path, k);
    SolverConfig local = cfg;
    local.dt = dt_k;
    u = step(u, t, local, s, inc ? &*inc : nullptr);
    check_finite(u, k + 1, t + dt_k);
    size_t done = k + 1;
    if (done == plan.n_steps || done % static_cast<size_t>(cfg.checkpoint_every) == 0)
      observe(done, std::min(plan.step_t(done), plan.horizon), u);
  }
}

}  // namespace

Trajectory solve(const GridFunction& u0, const SolverConfig& cfg,
                 const CoefficientSchedule& s, const NoiseSetup& noise,
                 std::uint64_t path_index) {
  validate_run(u0, cfg, s);
  const auto& wp = u0.grid()->weight_param();
  ConstantsReport constants = constants_report(s, wp, u0.grid()->dim());

  Trajectory traj;
  traj.K_A3 = constants.K_A3;
  const double u0_norm_sq = weighted_l2_norm_sq(u0);

  // Trace term per unit time, integrated along the run for the a-priori
  // bound (|u0|^2 + int_0^t tr ds) * exp(K_A3 t).
  double trace_integral = 0.0;
  size_t last_step = 0;

  try {
    integrate(u0, cfg, s, noise, path_index,
              0, [&](size_t step_index, double t, const GridFunction& u) {
                if (noise.active() && step_index > last_step) {
                  // accumulate tr over the steps since the last record
                  StepPlan plan = make_plan(cfg);
                  for (size_t k = last_step; k < step_index; ++k) {
                    double tk = plan.step_t(k) + 0.5 * plan.step_dt(k);
                    trace_integral +=
                        plan.step_dt(k) * noise.spec->weighted_trace_term((*noise.b)(tk));
                  }
                  last_step = step_index;
                }
                EnergyRow row;
                row.t = t;
                EnergyDecomposition e = energy_decomposition(u, t, s);
                row.pairing = e.pairing;
                row.mass_term = e.mass_term;
                row.grad_term = e.grad_term;
                row.slack = e.slack;
                row.h_norm_sq = weighted_l2_norm_sq(u);
                row.bound = (u0_norm_sq + trace_integral) * std::exp(constants.K_A3 * t);
                traj.energy.push_back(row);
                traj.times.push_back(t);
                traj.snapshot_steps.push_back(step_index);
                traj.snapshots.push_back(u);
              });
  } catch (const DivergenceError& err) {
    traj.diverged = true;
    traj.diverged_step = err.step;
  }
  return traj;
}

EnsembleStats solve_ensemble(const GridFunction& u0, const SolverConfig& cfg,
                             const CoefficientSchedule& s, const NoiseSetup& noise) {
  if (cfg.n_paths < 2) throw std::invalid_argument("ensemble needs n_paths >= 2");
  validate_run(u0, cfg, s);
  const auto& wp = u0.grid()->weight_param();
  ConstantsReport constants = constants_report(s, wp, u0.grid()->dim());
  const double u0_norm_sq = weighted_l2_norm_sq(u0);

  // Recorded step indices/times are path-independent; collect them up front.
  std::vector<double> times;
  std::vector<size_t> rec_steps;
  {
    StepPlan plan = make_plan(cfg);
    times.push_back(0.0);
    rec_steps.push_back(0);
    for (size_t k = 1; k <= plan.n_steps; ++k)
      if (k == plan.n_steps || k % static_cast<size_t>(cfg.checkpoint_every) == 0) {
        times.push_back(std::min(plan.step_t(k), plan.horizon));
        rec_steps.push_back(k);
      }
  }
  const size_t n_rec = times.size();
  const size_t n_nodes = u0.size();

  // Fixed-size path chunks accumulated independently and merged in chunk
  // order, so results are bit-identical for any thread count.
  constexpr int kChunk = 8;
  const int n_chunks = (cfg.n_paths + kChunk - 1) / kChunk;
  struct ChunkAcc {
    std::vector<std::vector<double>> sum, sumsq;  // [record][node]
    std::vector<std::vector<double>> hnorm;       // [record][path-in-chunk]
  };
  std::vector<ChunkAcc> chunks(static_cast<size_t>(n_chunks));

  auto run_chunk = [&](int ci) {
    ChunkAcc& acc = chunks[static_cast<size_t>(ci)];
    acc.sum.assign(n_rec, std::vector<double>(n_nodes, 0.0));
    acc.sumsq.assign(n_rec, std::vector<double>(n_nodes, 0.0));
    acc.hnorm.assign(n_rec, {});
    int lo = ci * kChunk, hi = std::min(cfg.n_paths, lo + kChunk);
    for (int p = lo; p < hi; ++p) {
      size_t slot = 0;
      integrate(u0, cfg, s, noise, static_cast<std::uint64_t>(p), 0,
                [&](size_t, double, const GridFunction& u) {
                  auto& sv = acc.sum[slot];
                  auto& sq = acc.sumsq[slot];
                  for (size_t i = 0; i < n_nodes; ++i) {
                    sv[i] += u[i];
                    sq[i] += u[i] * u[i];
                  }
                  acc.hnorm[slot].push_back(weighted_l2_norm_sq(u));
                  ++slot;
                });
    }
  };

  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned n_workers = std::min<unsigned>(hw, static_cast<unsigned>(n_chunks));
  if (n_workers <= 1) {
    for (int ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (int ci = next.fetch_add(1); ci < n_chunks; ci = next.fetch_add(1))
          run_chunk(ci);
      });
    for (auto& th : pool) th.join();
  }

  EnsembleStats stats;
  stats.n_paths = cfg.n_paths;
  stats.times = times;
  const double np = static_cast<double>(cfg.n_paths);
  double trace_integral = 0.0;
  StepPlan plan = make_plan(cfg);
  size_t trace_step = 0;
  for (size_t r = 0; r < n_rec; ++r) {
    GridFunction mean = GridFunction::zeros(u0.grid());
    GridFunction var = GridFunction::zeros(u0.grid());
    std::vector<double> hh;
    for (int ci = 0; ci < n_chunks; ++ci) {
      const ChunkAcc& acc = chunks[static_cast<size_t>(ci)];
      for (size_t i = 0; i < n_nodes; ++i) {
        mean[i] += acc.sum[r][i];
        var[i] += acc.sumsq[r][i];
      }
      hh.insert(hh.end(), acc.hnorm[r].begin(), acc.hnorm[r].end());
    }
    for (size_t i = 0; i < n_nodes; ++i) {
      mean[i] /= np;
      var[i] = std::max(0.0, (var[i] - np * mean[i] * mean[i]) / (np - 1.0));
    }
    double m = 0.0;
    for (double v : hh) m += v;
    m /= np;
    double s2 = 0.0;
    for (double v : hh) s2 += (v - m) * (v - m);
    s2 /= (np - 1.0);
    if (noise.active())
      while (trace_step < rec_steps[r]) {
        double tk = plan.step_t(trace_step) + 0.5 * plan.step_dt(trace_step);
        trace_integral +=
            plan.step_dt(trace_step) * noise.spec->weighted_trace_term((*noise.b)(tk));
        ++trace_step;
      }
    stats.mean.push_back(std::move(mean));
    stats.variance.push_back(std::move(var));
    stats.second_moment_norm.push_back(m);
    stats.second_moment_se.push_back(std::sqrt(s2 / np));
    stats.bound.push_back((u0_norm_sq + trace_integral) *
                          std::exp(constants.K_A3 * times[r]));
  }
  return stats;
}

Trajectory checkpoint_restore(const Trajectory& traj, size_t at_step,
                              const SolverConfig& cfg, const CoefficientSchedule& s,
                              const NoiseSetup& noise, std::uint64_t path_index) {
  size_t slot = traj.snapshot_steps.size();
  for (size_t i = 0; i < traj.snapshot_steps.size(); ++i)
    if (traj.snapshot_steps[i] == at_step) slot = i;
  if (slot == traj.snapshot_steps.size())
    throw std::invalid_argument("no checkpoint recorded at step " +
                                std::to_string(at_step));

  const GridFunction& u_start = traj.snapshots[slot];
  validate_run(u_start, cfg, s);
  Trajectory tail;
  tail.K_A3 = traj.K_A3;
  const double base_norm_sq = weighted_l2_norm_sq(u_start);
  const double t0 = traj.times[slot];
  try {
    integrate(u_start, cfg, s, noise, path_index, at_step,
              [&](size_t step_index, double t, const GridFunction& u) {
                EnergyRow row;
                row.t = t;
                EnergyDecomposition e = energy_decomposition(u, t, s);
                row.pairing = e.pairing;
                row.mass_term = e.mass_term;
                row.grad_term = e.grad_term;
                row.slack = e.slack;
                row.h_norm_sq = weighted_l2_norm_sq(u);
                // bound restarts from the checkpoint state
                row.bound = base_norm_sq * std::exp(tail.K_A3 * (t - t0));
                tail.energy.push_back(row);
                tail.times.push_back(t);
                tail.snapshot_steps.push_back(step_index);
                tail.snapshots.push_back(u);
              });
  } catch (const DivergenceError& err) {
    tail.diverged = true;
    tail.diverged_step = err.step;
  }
  return tail;
}

}  // namespace oulab
