#pragma once

// Closed forms and independent numerical oracles shared by the test suites.
// Everything here is test-only and kept independent of the library's own
// computational paths (plain quadrature formulas, Gaussian moments, RK4).

#include <cmath>
#include <functional>

namespace oracles {

// int x^{2k} exp(-a x^2) dx over R.
inline double gaussian_moment(int k, double a) {
  double v = std::sqrt(M_PI / a);
  for (int j = 1; j <= k; ++j) v *= (2.0 * j - 1.0) / (2.0 * a);
  return v;
}

// 1D weighted self-inner-product of the N(0, s2) density against
// exp(x^2/(2c)): (2 pi s2)^{-1} sqrt(pi / (1/s2 - 1/(2c))).
inline double normal_density_weighted_mass(double s2, double c) {
  double a = 1.0 / s2 - 1.0 / (2.0 * c);
  return std::sqrt(M_PI / a) / (2.0 * M_PI * s2);
}

// Variance of the OU law at time t for constant coefficients.
inline double ou_variance(double t, double f, double g2, double s0) {
  if (f == 0.0) return s0 + g2 * t;
  double d = std::exp(-2.0 * f * t);
  return d * s0 + g2 * (1.0 - d) / (2.0 * f);
}

// Fixed-step RK4 on ds2/dt = -2 f(t) s2 + g^2(t); the step-halving oracle for
// non-constant schedules.
inline double rk4_variance(const std::function<double(double)>& f,
                           const std::function<double(double)>& g2, double t,
                           double s0, int n_steps) {
  double s2 = s0;
  double h = t / n_steps;
  auto rhs = [&](double tau, double y) { return -2.0 * f(tau) * y + g2(tau); };
  for (int k = 0; k < n_steps; ++k) {
    double tk = k * h;
    double k1 = rhs(tk, s2);
    double k2 = rhs(tk + h / 2, s2 + h / 2 * k1);
    double k3 = rhs(tk + h / 2, s2 + h / 2 * k2);
    double k4 = rhs(tk + h, s2 + h * k3);
    s2 += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return s2;
}

inline double normal_peak(double s2) { return 1.0 / std::sqrt(2.0 * M_PI * s2); }

}  // namespace oracles
