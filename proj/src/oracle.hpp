#pragma once

#include <array>
#include <cstdint>

#include "grid.hpp"
#include "schedule.hpp"

namespace oulab {

// Isotropic Gaussian state. Closed under the linear drift -x f(t), so it is
// the exact solution class of the deterministic equation and the measure of
// the forward SDE.
struct GaussianState {
  int dim = 1;
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  double variance = 1.0;
};

// mean(t) = m0 exp(-F(t)), var(t) = exp(-2F)(s0 + int_0^t g^2 e^{2F}),
// F(t) = int_0^t f. Closed forms for constant schedules; adaptive Simpson
// (fourth order, split at schedule knots) otherwise.
GaussianState evolve_moments(const GaussianState& g0, const CoefficientSchedule& s,
                             double t);

GridFunction density_on_grid(const GaussianState& g, GridPtr grid);

// Euler-Maruyama particles of dX = -X f(t) dt + g(t) dW, binned on the grid
// (bin width = grid spacing, bins centered on nodes). Streams are addressed
// by (seed, particle, step), step 0 being the initial draw.
GridFunction particle_forward_sde(const GaussianState& g0, const CoefficientSchedule& s,
                                  GridPtr grid, long n_particles, double dt,
                                  std::uint64_t seed);

enum class DensityNorm { L1, L2, Linf, WeightedL2 };

double compare_densities(const GridFunction& a, const GridFunction& b, DensityNorm n);

// Adaptive Simpson on [a, b] split at the supplied knots; shared with tests.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& knots, double tol = 1e-12);

}  // namespace oulab
