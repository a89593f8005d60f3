#include "doctest.h"

#include <cmath>

#include "oracle.hpp"
#include "oracles.hpp"
#include "solver.hpp"

using namespace oulab;

namespace {

CoefficientSchedule make_constant(double f, double g, double T = 1.0) {
  return CoefficientSchedule(Schedule::constant(f, T), Schedule::constant(g, T));
}

GridFunction normal_density(GridPtr g, double s2) {
  GaussianState gs{g->dim(), {0, 0, 0}, s2};
  return density_on_grid(gs, g);
}

double linf_vs_oracle(const Trajectory& traj, GridPtr g, double s2) {
  GridFunction oracle = normal_density(g, s2);
  return compare_densities(traj.snapshots.back(), oracle, DensityNorm::Linf);
}

}  // namespace

TEST_CASE("zero state is an equilibrium") {
  auto g = make_grid(1, 8.0, 129, WeightParam::weighted(1.0));
  auto s = make_constant(1.0, std::sqrt(2.0));
  SolverConfig cfg;
  cfg.dt = 1e-3;
  auto u = step(GridFunction::zeros(g), 0.0, cfg, s);
  CHECK(u.max_abs() == 0.0);
}

TEST_CASE("stationary state preserved to O(dt h^2) per step") {
  auto s = make_constant(1.0, std::sqrt(2.0));
  SolverConfig cfg;
  cfg.dt = 1e-4;
  double errs[3];
  int idx = 0;
  for (int n : {129, 257, 513}) {
    auto g = make_grid(1, 8.0, n, WeightParam::weighted(1.0));
    auto u0 = normal_density(g, 1.0);
    auto u1 = step(u0, 0.0, cfg, s);
    double err = 0.0;
    for (size_t i = 0; i < u0.size(); ++i) err = std::max(err, std::abs(u1[i] - u0[i]));
    double h = g->spacing();
    CHECK(err <= 1.0 * cfg.dt * h * h);
    errs[idx++] = err;
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("deterministic solve tracks the Gaussian oracle") {
  auto g = make_grid(1, 8.0, 257, WeightParam::weighted(1.0));
  auto s = make_constant(1.0, std::sqrt(2.0));
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  auto traj = solve(normal_density(g, 0.25), cfg, s);
  REQUIRE_FALSE(traj.diverged);
  double s2 = oracles::ou_variance(1.0, 1.0, 2.0, 0.25);
  CHECK(linf_vs_oracle(traj, g, s2) <= 5e-4);  // measured 1.31e-4

  // unweighted mass conserved
  CHECK(std::abs(integral(traj.snapshots.back()) - integral(traj.snapshots.front())) <=
        1e-8);

  // weighted-norm control along the trajectory
  for (const auto& row : traj.energy) {
    CHECK(row.h_norm_sq <= row.bound * (1.0 + 1e-6) + 1e-12);
    CHECK(row.slack >= -1e-8);
  }
}

TEST_CASE("heat mode (f == 0, unweighted) matches the diffusion law") {
  auto g = make_grid(1, 8.0, 257, WeightParam::unit());
  auto s = make_constant(0.0, std::sqrt(2.0));
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 0.5;
  auto traj = solve(normal_density(g, 0.25), cfg, s);
  REQUIRE_FALSE(traj.diverged);
  CHECK(linf_vs_oracle(traj, g, 0.25 + 2.0 * 0.5) <= 1e-3);  // measured 2.8e-4
}

TEST_CASE("weighted mode requires the admissibility condition") {
  auto g = make_grid(1, 8.0, 129, WeightParam::weighted(0.4));
  auto s = make_constant(1.0, 1.0);  // needs c >= 0.5
  SolverConfig cfg;
  CHECK_THROWS_AS(solve(normal_density(g, 0.25), cfg, s), std::invalid_argument);

  // unweighted mode insists on f == 0
  auto gu = make_grid(1, 8.0, 129, WeightParam::unit());
  CHECK_THROWS_AS(solve(normal_density(gu, 0.25), cfg, make_constant(1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("solver converges at second order in h") {
  auto s = make_constant(1.0, std::sqrt(2.0));
  double errs[3];
  int idx = 0;
  for (int n : {129, 257, 513}) {
    auto g = make_grid(1, 8.0, n, WeightParam::weighted(1.0));
    SolverConfig cfg;
    cfg.dt = 2e-5;
    cfg.horizon = 0.25;
    auto traj = solve(normal_density(g, 0.25), cfg, s);
    errs[idx++] = linf_vs_oracle(traj, g, oracles::ou_variance(0.25, 1.0, 2.0, 0.25));
  }
  double order1 = std::log2(errs[0] / errs[1]);
  double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 >= 1.7);
  CHECK(order1 <= 2.3);
  CHECK(order2 >= 1.7);
  CHECK(order2 <= 2.3);
}

TEST_CASE("solver converges at first order in dt") {
  // time-dependent coefficients expose the splitting error; self-comparison
  // against a fine-dt reference removes the h bias
  auto s = CoefficientSchedule(Schedule::linear(1.0, 1.0, 1.0),
                               Schedule::sqrt_polynomial({2.0, 1.0}, 1.0));
  auto g = make_grid(1, 8.0, 257, WeightParam::weighted(1.0));
  auto u0 = normal_density(g, 0.25);
  SolverConfig ref_cfg;
  ref_cfg.dt = 1.25e-4;
  ref_cfg.horizon = 1.0;
  auto ref = solve(u0, ref_cfg, s);
  double errs[3];
  int idx = 0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.horizon = 1.0;
    auto traj = solve(u0, cfg, s);
    errs[idx++] = compare_densities(traj.snapshots.back(), ref.snapshots.back(),
                                    DensityNorm::Linf);
  }
  double order1 = std::log2(errs[0] / errs[1]);
  double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 >= 0.7);
  CHECK(order1 <= 1.3);
  CHECK(order2 >= 0.7);
  CHECK(order2 <= 1.3);
}

TEST_CASE("noisy steps and trajectories are bit-reproducible") {
  auto g = make_grid(1, 6.0, 129, WeightParam::weighted(1.0));
  auto s = make_constant(1.0, std::sqrt(2.0));
  auto spec = QWienerSpec::sine_basis(g, 6, 0.02);
  auto b = Schedule::constant(0.05, 1.0);

  SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 0.5;
  cfg.seed = 2024;
  cfg.checkpoint_every = 10;
  NoiseSetup ns{&spec, &b};

  auto u0 = normal_density(g, 0.25);
  auto t1 = solve(u0, cfg, s, ns);
  auto t2 = solve(u0, cfg, s, ns);
  REQUIRE_FALSE(t1.diverged);
  REQUIRE(t1.snapshots.size() == t2.snapshots.size());
  for (size_t k = 0; k < t1.snapshots.size(); ++k)
    for (size_t i = 0; i < t1.snapshots[k].size(); ++i)
      CHECK(t1.snapshots[k][i] == t2.snapshots[k][i]);

  // a single noisy step re-run is bit-identical too
  auto inc = sample_increment(spec, 0.0, cfg.dt, b, cfg.seed, 0, 0);
  auto s1 = step(u0, 0.0, cfg, s, &inc);
  auto s2 = step(u0, 0.0, cfg, s, &inc);
  for (size_t i = 0; i < s1.size(); ++i) CHECK(s1[i] == s2[i]);
}

TEST_CASE("checkpoint restore reproduces the tail bit-exactly") {
  auto g = make_grid(1, 6.0, 129, WeightParam::weighted(1.0));
  auto s = make_constant(1.0, std::sqrt(2.0));
  auto spec = QWienerSpec::sine_basis(g, 4, 0.02);
  auto b = Schedule::constant(0.05, 1.0);
  SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  cfg.seed = 7;
  cfg.checkpoint_every = 20;
  NoiseSetup ns{&spec, &b};
  auto u0 = normal_density(g, 0.25);
  auto traj = solve(u0, cfg, s, ns);

  // restore at step 0 reproduces everything
  auto full = checkpoint_restore(traj, 0, cfg, s, ns);
  REQUIRE(full.snapshots.size() == traj.snapshots.size());
  for (size_t k = 0; k < traj.snapshots.size(); ++k)
    for (size_t i = 0; i < traj.snapshots[k].size(); ++i)
      CHECK(full.snapshots[k][i] == traj.snapshots[k][i]);

  // restore at the midpoint reproduces the tail
  size_t mid_step = traj.snapshot_steps[traj.snapshot_steps.size() / 2];
  auto tail = checkpoint_restore(traj, mid_step, cfg, s, ns);
  size_t offset = traj.snapshot_steps.size() - tail.snapshot_steps.size();
  for (size_t k = 0; k < tail.snapshots.size(); ++k) {
    CHECK(tail.snapshot_steps[k] == traj.snapshot_steps[offset + k]);
    for (size_t i = 0; i < tail.snapshots[k].size(); ++i)
      CHECK(tail.snapshots[k][i] == traj.snapshots[offset + k][i]);
  }

  // a different seed diverges from the original tail but still obeys the bound
  SolverConfig cfg2 = cfg;
  cfg2.seed = 8;
  auto other = checkpoint_restore(traj, mid_step, cfg2, s, ns);
  bool differs = false;
  for (size_t i = 0; i < other.snapshots.back().size(); ++i)
    if (other.snapshots.back()[i] != traj.snapshots.back()[i]) differs = true;
  CHECK(differs);
  for (const auto& row : other.energy) CHECK(std::isfinite(row.h_norm_sq));

  CHECK_THROWS_AS(checkpoint_restore(traj, 3, cfg, s, ns), std::invalid_argument);
}

TEST_CASE("explicit scheme: stability guard and drift blow-up detection") {
  auto g = make_grid(1, 8.0, 257, WeightParam::weighted(1.0));
  auto s = make_constant(1.0, std::sqrt(2.0));
  SolverConfig cfg;
  cfg.scheme = Scheme::Explicit;
  cfg.horizon = 1.0;
  cfg.dt = 1.0;  // far beyond h^2/(g^2 d)
  CHECK_THROWS_AS(solve(normal_density(g, 0.25), cfg, s), std::invalid_argument);

  // drift-dominated run passes the diffusion guard yet diverges; the solver
  // reports the step instead of emitting garbage
  auto s_adv = make_constant(60.0, 0.1);
  SolverConfig cfg2;
  cfg2.scheme = Scheme::Explicit;
  double h = g->spacing();
  cfg2.dt = 0.5 * h * h / (0.01 * 1);
  cfg2.horizon = 1.0;
  cfg2.checkpoint_every = 1;
  auto traj = solve(normal_density(g, 1.0), cfg2, s_adv);
  CHECK(traj.diverged);
  CHECK(traj.diverged_step > 0);
  CHECK(traj.snapshots.back().all_finite());

  // a stable explicit run agrees with the semi-implicit one
  SolverConfig cfg3;
  cfg3.scheme = Scheme::Explicit;
  cfg3.dt = 0.9 * h * h / (2.0 * 1);
  cfg3.horizon = 0.1;
  auto te = solve(normal_density(g, 0.25), cfg3, s);
  SolverConfig cfg4;
  cfg4.dt = cfg3.dt;
  cfg4.horizon = 0.1;
  auto ti = solve(normal_density(g, 0.25), cfg4, s);
  CHECK(compare_densities(te.snapshots.back(), ti.snapshots.back(), DensityNorm::Linf) <=
        1e-3);
}

TEST_CASE("ensemble statistics") {
  auto g = make_grid(1, 6.0, 129, WeightParam::weighted(1.0));
  auto s = make_constant(1.0, std::sqrt(2.0));
  SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 0.5;
  cfg.seed = 11;
  cfg.checkpoint_every = 10;
  auto u0 = normal_density(g, 0.25);

  CHECK_THROWS_AS(solve_ensemble(u0, cfg, s, {}), std::invalid_argument);  // 1 path

  // noiseless ensemble: every path equals the deterministic trajectory
  cfg.n_paths = 2;
  auto stats = solve_ensemble(u0, cfg, s, {});
  auto det = solve(u0, cfg, s);
  for (size_t i = 0; i < u0.size(); ++i) {
    CHECK(stats.mean.back()[i] == det.snapshots.back()[i]);
    CHECK(stats.variance.back()[i] == 0.0);
  }

  // noisy ensemble mean approaches the deterministic solution
  auto spec = QWienerSpec::sine_basis(g, 6, 0.02);
  auto b = Schedule::constant(0.05, 1.0);
  NoiseSetup ns{&spec, &b};
  cfg.n_paths = 100;
  auto nstats = solve_ensemble(u0, cfg, s, ns);
  size_t violations = 0;
  for (size_t i = 0; i < u0.size(); ++i) {
    double se = std::sqrt(nstats.variance.back()[i] / cfg.n_paths);
    if (std::abs(nstats.mean.back()[i] - det.snapshots.back()[i]) > 3.0 * se + 1e-12)
      ++violations;
  }
  CHECK(violations == 0);

  // second-moment bound holds at every recorded time
  for (size_t r = 0; r < nstats.times.size(); ++r)
    CHECK(nstats.second_moment_norm[r] <=
          nstats.bound[r] * (1.0 + 1e-6) + 3.0 * nstats.second_moment_se[r]);
}

TEST_CASE("piecewise-constant schedules converge to the continuous run") {
  // the N-piece frozen-coefficient runs approach the continuous-schedule run
  auto g = make_grid(1, 6.0, 257, WeightParam::weighted(1.0));
  auto u0 = normal_density(g, 0.25);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;

  auto cont = CoefficientSchedule(Schedule::linear(0.05, 0.45, 1.0),
                                  Schedule::sqrt_polynomial({0.1, 0.9}, 1.0));
  auto ref = solve(u0, cfg, cont);

  double prev_gap = std::numeric_limits<double>::infinity();
  for (int N : {2, 4, 8, 16}) {
    std::vector<double> fv, gv, breaks;
    for (int i = 0; i < N; ++i) {
      double ti = static_cast<double>(i) / N;
      fv.push_back(cont.f(ti));
      gv.push_back(cont.g(ti));
      if (i > 0) breaks.push_back(ti);
    }
    auto pc = CoefficientSchedule(Schedule::piecewise_constant(fv, breaks, 1.0),
                                  Schedule::piecewise_constant(gv, breaks, 1.0));
    auto traj = solve(u0, cfg, pc);
    double gap = compare_densities(traj.snapshots.back(), ref.snapshots.back(),
                                   DensityNorm::Linf);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-2);
}
