#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace oulab {

namespace {

double simpson_segment(const std::function<double(double)>& f, double a, double fa,
                       double b, double fb, double fm, double whole, double tol,
                       int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_segment(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) +
         simpson_segment(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1);
}

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_segment(f, a, fa, b, fb, fm, whole, tol, 48);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& knots, double tol) {
  std::vector<double> cuts{a, b};
  for (double k : knots)
    if (k > a && k < b) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += simpson(f, cuts[i], cuts[i + 1], tol);
  return acc;
}

GaussianState evolve_moments(const GaussianState& g0, const CoefficientSchedule& s,
                             double t) {
  if (!(t >= 0.0 && t <= s.horizon))
    throw std::domain_error("moment evolution time outside [0, T]");
  GaussianState out = g0;
  if (t == 0.0) return out;

  if (s.f.kind() == ScheduleKind::Constant && s.g.kind() == ScheduleKind::Constant) {
    double f = s.f(0.0), g2 = s.g_squared(0.0);
    double decay = std::exp(-f * t);
    for (int a = 0; a < g0.dim; ++a) out.mean[static_cast<size_t>(a)] *= decay;
    out.variance = (f == 0.0)
                       ? g0.variance + g2 * t
                       : decay * decay * g0.variance +
                             g2 * (1.0 - decay * decay) / (2.0 * f);
    return out;
  }

  std::vector<double> knots = s.f.critical_times();
  for (double k : s.g.critical_times()) knots.push_back(k);
  auto F = [&](double tau) {
    return adaptive_simpson([&](double x) { return s.f(x); }, 0.0, tau, knots);
  };
  double Ft = F(t);
  double I = adaptive_simpson(
      [&](double x) { return s.g_squared(x) * std::exp(2.0 * F(x)); }, 0.0, t, knots);
  double decay = std::exp(-Ft);
  for (int a = 0; a < g0.dim; ++a) out.mean[static_cast<size_t>(a)] *= decay;
  out.variance = decay * decay * (g0.variance + I);
  return out;
}

GridFunction density_on_grid(const GaussianState& g, GridPtr grid) {
  if (g.dim != grid->dim())
    throw std::invalid_argument("gaussian state and grid dimension mismatch");
  const double s2 = g.variance;
  const double norm = std::pow(2.0 * M_PI * s2, -0.5 * g.dim);
  return GridFunction::sample(grid, [&](const double* x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      double dx = x[a] - g.mean[static_cast<size_t>(a)];
      r2 += dx * dx;
    }
    return norm * std::exp(-r2 / (2.0 * s2));
  });
}

GridFunction particle_forward_sde(const GaussianState& g0, const CoefficientSchedule& s,
                                  GridPtr grid, long n_particles, double dt,
                                  std::uint64_t seed) {
  if (n_particles < 100) throw std::invalid_argument("need at least 100 particles");
  if (!(dt > 0.0)) throw std::invalid_argument("particle dt must be positive");
  const auto& g = *grid;
  const int d = g.dim();
  const double h = g.spacing();
  const double L = g.half_width();
  const double T = s.horizon;
  const size_t n_steps = static_cast<size_t>(std::ceil(T / dt - 1e-9));

  std::vector<double> counts(g.size(), 0.0);
  const double sigma0 = std::sqrt(g0.variance);
  const int n_axis = g.points_per_axis();

  for (long p = 0; p < n_particles; ++p) {
    double x[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a)
      x[a] = g0.mean[static_cast<size_t>(a)] +
             sigma0 * rng::normal(seed, static_cast<std::uint64_t>(p), 0,
                                  static_cast<std::uint64_t>(a));
    for (size_t k = 0; k < n_steps; ++k) {
      double t = static_cast<double>(k) * dt;
      double dtk = std::min(dt, T - t);
      double f = s.f(t);
      double gt = s.g(t);
      double amp = gt * std::sqrt(dtk);
      for (int a = 0; a < d; ++a)
        x[a] += -x[a] * f * dtk + amp * rng::normal(seed, static_cast<std::uint64_t>(p),
                                                    k + 1, static_cast<std::uint64_t>(a));
    }
    // node-centered bin: i = round((x + L)/h)
    size_t flat = 0;
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      long i = std::lround((x[a] + L) / h);
      if (i < 0 || i >= n_axis) {
        inside = false;
        break;
      }
      flat = flat * static_cast<size_t>(n_axis) + static_cast<size_t>(i);
    }
    if (inside) counts[flat] += 1.0;
  }

  GridFunction out = GridFunction::zeros(grid);
  const double cell = std::pow(h, d);
  for (size_t i = 0; i < counts.size(); ++i)
    out[i] = counts[i] / (static_cast<double>(n_particles) * cell);
  return out;
}

double compare_densities(const GridFunction& a, const GridFunction& b, DensityNorm n) {
  check_same_grid(a, b);
  const auto& g = *a.grid();
  switch (n) {
    case DensityNorm::L1: {
      double acc = 0.0;
      for (size_t i = 0; i < a.size(); ++i) acc += g.quad_weight(i) * std::abs(a[i] - b[i]);
      return acc;
    }
    case DensityNorm::L2: {
      double acc = 0.0;
      for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += g.quad_weight(i) * d * d;
      }
      return std::sqrt(acc);
    }
    case DensityNorm::Linf: {
      double m = 0.0;
      for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    }
    case DensityNorm::WeightedL2: {
      double acc = 0.0;
      for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += g.quad_weight(i) * g.weight_at(i) * d * d;
      }
      return std::sqrt(acc);
    }
  }
  return 0.0;
}

}  // namespace oulab
