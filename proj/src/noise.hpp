#pragma once

#include <cstdint>

#include "grid.hpp"
#include "schedule.hpp"

namespace oulab {

// Truncated Q-Wiener process on the solver grid. Modes are tensor sine
// functions vanishing on the box boundary, orthonormal in the unweighted
// discrete L^2 (exactly, by the discrete sine orthogonality on uniform
// grids). Eigenvalues q = q0 * prod_a k_a^-decay, sorted nonincreasing.
class QWienerSpec {
 public:
  static QWienerSpec sine_basis(GridPtr grid, int mode_count, double q0,
                                double decay = 2.0);

  const GridPtr& grid() const { return grid_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }
  const GridFunction& mode(int k) const { return modes_[static_cast<size_t>(k)]; }
  double eigenvalue(int k) const { return eigenvalues_[static_cast<size_t>(k)]; }
  const std::array<int, 3>& mode_index(int k) const {
    return indices_[static_cast<size_t>(k)];
  }
  double trace() const;

  // Hilbert-Schmidt norm squared of B(t) = b(t) * embedding, measured in the
  // weighted H norm: b(t)^2 * sum_k q_k |e_k|_H^2.
  double weighted_trace_term(double b_value) const;

 private:
  GridPtr grid_;
  std::vector<GridFunction> modes_;
  std::vector<double> eigenvalues_;
  std::vector<std::array<int, 3>> indices_;
  double weighted_mode_mass_ = 0.0;  // sum q_k |e_k|_H^2, fixed at build
};

struct NoiseIncrement {
  double dt = 0.0;
  GridFunction values;
};

// b(t) * sum_k sqrt(q_k dt) xi_k e_k with xi_k from the counter stream
// (seed, path, step, k); bit-reproducible for a fixed address.
NoiseIncrement sample_increment(const QWienerSpec& spec, double t, double dt,
                                const Schedule& b, std::uint64_t seed,
                                std::uint64_t path, std::uint64_t step);

struct HsNormCheck {
  double norm = 0.0;
  double bound = 0.0;
  bool ok = true;
};

// Checks |b(t)| sqrt(sum q_k |e_k|_H^2) <= h(t).
HsNormCheck hs_norm_bound_check(const QWienerSpec& spec, const Schedule& b,
                                const Schedule& h_bound, double t);

}  // namespace oulab
