#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>

#include "noise.hpp"
#include "op.hpp"

namespace oulab {

enum class Scheme { SemiImplicit, Explicit };

struct SolverConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::SemiImplicit;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  int n_paths = 1;
  int checkpoint_every = 100;  // record stride in steps
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(size_t step, double t)
      : std::runtime_error("solution diverged at step " + std::to_string(step) +
                           " (t = " + std::to_string(t) + ")"),
        step(step), t(t) {}
  size_t step;
  double t;
};

struct EnergyRow {
  double t = 0.0;
  double pairing = 0.0;
  double mass_term = 0.0;
  double grad_term = 0.0;
  double slack = 0.0;
  double h_norm_sq = 0.0;
  double bound = 0.0;  // a-priori bound on |u_t|_H^2 (expectation-level with noise)
};

struct Trajectory {
  std::vector<double> times;
  std::vector<size_t> snapshot_steps;
  std::vector<GridFunction> snapshots;
  std::vector<EnergyRow> energy;
  bool diverged = false;
  size_t diverged_step = 0;
  double K_A3 = 0.0;
};

// One time step u(t) -> u(t + dt). Semi-implicit treats the diffusion
// implicitly (tridiagonal solve per axis, alternating-direction sweeps for
// d >= 2) with coefficients at the midpoint t + dt/2; explicit is forward
// Euler-Maruyama with the stability guard dt <= h^2/(g^2_max d) enforced by
// solve(). The optional noise increment enters the right-hand side.
GridFunction step(const GridFunction& u, double t, const SolverConfig& cfg,
                  const CoefficientSchedule& s,
                  const NoiseIncrement* noise = nullptr);

struct NoiseSetup {
  const QWienerSpec* spec = nullptr;
  const Schedule* b = nullptr;
  bool active() const { return spec && b && spec->mode_count() > 0; }
};

Trajectory solve(const GridFunction& u0, const SolverConfig& cfg,
                 const CoefficientSchedule& s, const NoiseSetup& noise = {},
                 std::uint64_t path_index = 0);

struct EnsembleStats {
  std::vector<double> times;
  std::vector<GridFunction> mean;      // across paths, per recorded time
  std::vector<GridFunction> variance;  // unbiased nodewise sample variance
  std::vector<double> second_moment_norm;  // MC estimate of E|u_t|_H^2
  std::vector<double> second_moment_se;
  std::vector<double> bound;  // a-priori bound on E|u_t|_H^2
  int n_paths = 0;
};

EnsembleStats solve_ensemble(const GridFunction& u0, const SolverConfig& cfg,
                             const CoefficientSchedule& s, const NoiseSetup& noise);

// Continues a trajectory from a recorded step; with the same stream addresses
// the tail reproduces the original run bit-exactly.
Trajectory checkpoint_restore(const Trajectory& traj, size_t at_step,
                              const SolverConfig& cfg, const CoefficientSchedule& s,
                              const NoiseSetup& noise = {},
                              std::uint64_t path_index = 0);

}  // namespace oulab
