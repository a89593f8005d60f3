#include "noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace oulab {

QWienerSpec QWienerSpec::sine_basis(GridPtr grid, int mode_count, double q0,
                                    double decay) {
  if (mode_count < 0) throw std::invalid_argument("mode count must be nonnegative");
  if (!(q0 > 0.0)) throw std::invalid_argument("q0 must be positive");
  const auto& g = *grid;
  const int d = g.dim();
  const double L = g.half_width();

  QWienerSpec spec;
  spec.grid_ = grid;
  if (mode_count == 0) return spec;

  // Discrete sine orthogonality needs k <= n-2 per axis; the m-th largest
  // eigenvalue never needs an axis index beyond m.
  const int k_max = std::min(g.points_per_axis() - 2, mode_count);
  std::vector<std::pair<std::array<int, 3>, double>> cand;
  std::array<int, 3> k{1, 1, 1};
  auto push = [&](const std::array<int, 3>& kk) {
    double q = q0;
    for (int a = 0; a < d; ++a) q *= std::pow(static_cast<double>(kk[static_cast<size_t>(a)]), -decay);
    cand.push_back({kk, q});
  };
  if (d == 1) {
    for (k[0] = 1; k[0] <= k_max; ++k[0]) push(k);
  } else if (d == 2) {
    for (k[0] = 1; k[0] <= k_max; ++k[0])
      for (k[1] = 1; k[1] <= k_max; ++k[1]) push(k);
  } else {
    for (k[0] = 1; k[0] <= k_max; ++k[0])
      for (k[1] = 1; k[1] <= k_max; ++k[1])
        for (k[2] = 1; k[2] <= k_max; ++k[2]) push(k);
  }
  std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<size_t>(mode_count) > cand.size())
    throw std::invalid_argument("mode count exceeds what the grid resolves");

  const double norm = 1.0 / std::sqrt(std::pow(L, d));
  for (int m = 0; m < mode_count; ++m) {
    const auto kk = cand[static_cast<size_t>(m)].first;
    GridFunction e = GridFunction::sample(grid, [&](const double* x) {
      double v = norm;
      for (int a = 0; a < d; ++a)
        v *= std::sin(kk[static_cast<size_t>(a)] * M_PI * (x[a] + L) / (2.0 * L));
      return v;
    });
    spec.modes_.push_back(std::move(e));
    spec.eigenvalues_.push_back(cand[static_cast<size_t>(m)].second);
    spec.indices_.push_back(kk);
  }
  double acc = 0.0;
  for (size_t k = 0; k < spec.modes_.size(); ++k)
    acc += spec.eigenvalues_[k] * weighted_l2_norm_sq(spec.modes_[k]);
  spec.weighted_mode_mass_ = acc;
  return spec;
}

double QWienerSpec::trace() const {
  double t = 0.0;
  for (double q : eigenvalues_) t += q;
  return t;
}

double QWienerSpec::weighted_trace_term(double b_value) const {
  return b_value * b_value * weighted_mode_mass_;
}

NoiseIncrement sample_increment(const QWienerSpec& spec, double t, double dt,
                                const Schedule& b, std::uint64_t seed,
                                std::uint64_t path, std::uint64_t step) {
  if (!(dt > 0.0)) throw std::invalid_argument("noise increment needs dt > 0");
  NoiseIncrement inc{dt, GridFunction::zeros(spec.grid())};
  const double bv = b(t);
  if (bv == 0.0 || spec.mode_count() == 0) return inc;
  for (int k = 0; k < spec.mode_count(); ++k) {
    double xi = rng::normal(seed, path, step, static_cast<std::uint64_t>(k));
    double amp = bv * std::sqrt(spec.eigenvalue(k) * dt) * xi;
    const GridFunction& e = spec.mode(k);
    for (size_t i = 0; i < inc.values.size(); ++i) inc.values[i] += amp * e[i];
  }
  return inc;
}

HsNormCheck hs_norm_bound_check(const QWienerSpec& spec, const Schedule& b,
                                const Schedule& h_bound, double t) {
  HsNormCheck out;
  out.norm = std::sqrt(spec.weighted_trace_term(b(t)));
  out.bound = h_bound(t);
  out.ok = out.norm <= out.bound;
  return out;
}

}  // namespace oulab
