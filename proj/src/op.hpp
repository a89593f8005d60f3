#pragma once

#include <span>

#include "grid.hpp"
#include "schedule.hpp"

namespace oulab {

// Discrete drift-diffusion operator A(t, v) = f(t) div(x v) + g^2(t)/2 lap(v).
// The drift divergence is in conservative flux form (interface fluxes
// x_{i+1/2} * (v_i + v_{i+1})/2), which makes the unweighted integral of A v
// telescope to pure boundary fluxes, matching the mass conservation of the
// underlying Fokker-Planck equation. Output is zero on boundary nodes.
GridFunction apply_A(double t, const GridFunction& v, const CoefficientSchedule& s);

// Flux-form divergence of (x v) alone, exposed for the solver's drift stage.
GridFunction flux_divergence_xv(const GridFunction& v);

// 2d+1-point Laplacian, zero on boundary nodes.
GridFunction laplacian(const GridFunction& v);

// <u, A(t) v>_H realized as quadrature[u * A(t,v) * w]. Bilinear, not
// symmetric for f > 0 (the drift is not self-adjoint in H).
double weak_pairing(const GridFunction& u, const GridFunction& v, double t,
                    const CoefficientSchedule& s);

// One-sided energy bound of the pairing:
//   <v, A v> <= mass_term - grad_term,
//   mass_term = (d f/2 + d g^2/(4c)) |v|_H^2,  grad_term = (g^2/2) |grad v|_w^2,
// with slack = mass_term - grad_term - pairing >= 0 in the continuum whenever
// f - g^2/(2c) >= 0. The exact identity behind it:
//   slack = (f - g^2/(2c)) / (2c) * quadrature[||x||^2 v^2 w],
// which the verify module uses as the equality diagnostic.
struct EnergyDecomposition {
  double pairing = 0.0;
  double mass_term = 0.0;
  double grad_term = 0.0;
  double slack = 0.0;
  bool guaranteed = true;  // false when condition (f - g^2/2c >= 0) fails at t
};

EnergyDecomposition energy_decomposition(const GridFunction& v, double t,
                                         const CoefficientSchedule& s);

// max over candidates u of |<u, A v>| / ||u||_V; a certified lower bound on
// the discrete dual norm of A(t, v).
double dual_norm_lower_bound(const GridFunction& v, double t,
                             const CoefficientSchedule& s,
                             std::span<const GridFunction> candidates);

}  // namespace oulab
