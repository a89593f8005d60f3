#include "op.hpp"

#include <cmath>
#include <stdexcept>

namespace oulab {

namespace {

template <typename Fn>
void for_each_line(const WeightedGrid& g, int axis, Fn&& fn) {
  const int n = g.points_per_axis();
  const size_t stride = g.stride(axis);
  const size_t line_span = stride * static_cast<size_t>(n);
  for (size_t block = 0; block < g.size(); block += line_span)
    for (size_t off = 0; off < stride; ++off) fn(block + off, stride);
}

void zero_boundary(GridFunction& u) {
  const auto& g = *u.grid();
  for (size_t i = 0; i < u.size(); ++i)
    if (g.is_boundary(i)) u[i] = 0.0;
}

}  // namespace

GridFunction flux_divergence_xv(const GridFunction& v) {
  const auto& g = *v.grid();
  const int n = g.points_per_axis();
  const double h = g.spacing();
  GridFunction out = GridFunction::zeros(v.grid());
  for (int a = 0; a < g.dim(); ++a) {
    for_each_line(g, a, [&](size_t base, size_t s) {
      auto at = [&](int i) { return v[base + s * static_cast<size_t>(i)]; };
      // Interface flux F_{i+1/2} = x_{i+1/2} (v_i + v_{i+1}) / 2.
      double f_left = (g.axis_coord(0) + 0.5 * h) * 0.5 * (at(0) + at(1));
      for (int i = 1; i < n - 1; ++i) {
        double f_right = (g.axis_coord(i) + 0.5 * h) * 0.5 * (at(i) + at(i + 1));
        out[base + s * static_cast<size_t>(i)] += (f_right - f_left) / h;
        f_left = f_right;
      }
    });
  }
  zero_boundary(out);
  return out;
}

GridFunction laplacian(const GridFunction& v) {
  const auto& g = *v.grid();
  const int n = g.points_per_axis();
  const double h2 = g.spacing() * g.spacing();
  GridFunction out = GridFunction::zeros(v.grid());
  for (int a = 0; a < g.dim(); ++a) {
    for_each_line(g, a, [&](size_t base, size_t s) {
      auto at = [&](int i) { return v[base + s * static_cast<size_t>(i)]; };
      for (int i = 1; i < n - 1; ++i)
        out[base + s * static_cast<size_t>(i)] +=
            (at(i + 1) - 2.0 * at(i) + at(i - 1)) / h2;
    });
  }
  zero_boundary(out);
  return out;
}

GridFunction apply_A(double t, const GridFunction& v, const CoefficientSchedule& s) {
  const double f = s.f(t);
  const double nu = 0.5 * s.g_squared(t);
  GridFunction drift = flux_divergence_xv(v);
  GridFunction diff = laplacian(v);
  GridFunction out = GridFunction::zeros(v.grid());
  for (size_t i = 0; i < out.size(); ++i) out[i] = f * drift[i] + nu * diff[i];
  return out;
}

double weak_pairing(const GridFunction& u, const GridFunction& v, double t,
                    const CoefficientSchedule& s) {
  check_same_grid(u, v);
  return weighted_l2_inner(u, apply_A(t, v, s));
}

EnergyDecomposition energy_decomposition(const GridFunction& v, double t,
                                         const CoefficientSchedule& s) {
  const auto& wp = v.grid()->weight_param();
  const int d = v.grid()->dim();
  const double f = s.f(t);
  const double g2 = s.g_squared(t);

  EnergyDecomposition e;
  e.pairing = weak_pairing(v, v, t, s);
  double mass_coef = d * f / 2.0 + d * g2 * wp.inv_c() / 4.0;
  e.mass_term = mass_coef * weighted_l2_norm_sq(v);
  double grad_sq = 0.0;
  for (const auto& dv : gradient(v)) grad_sq += weighted_l2_norm_sq(dv);
  e.grad_term = 0.5 * g2 * grad_sq;
  e.slack = e.mass_term - e.grad_term - e.pairing;
  e.guaranteed = condition_slack(s, wp, t) >= -1e-12;
  return e;
}

double dual_norm_lower_bound(const GridFunction& v, double t,
                             const CoefficientSchedule& s,
                             std::span<const GridFunction> candidates) {
  if (candidates.empty())
    throw std::invalid_argument("dual norm bound needs at least one candidate");
  GridFunction av = apply_A(t, v, s);
  double best = 0.0;
  for (const auto& u : candidates) {
    double norm = v_norm(u);
    if (!(norm > 0.0))
      throw std::invalid_argument("dual norm candidates must be nonzero");
    best = std::max(best, std::abs(weighted_l2_inner(u, av)) / norm);
  }
  return best;
}

}  // namespace oulab
