#include "family.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "rng.hpp"

namespace oulab {

double Polynomial::eval(const double* x) const {
  double acc = 0.0;
  for (const auto& [e, coef] : terms) {
    double m = coef;
    for (int a = 0; a < dim; ++a)
      for (int k = 0; k < e[static_cast<size_t>(a)]; ++k) m *= x[a];
    acc += m;
  }
  return acc;
}

Polynomial Polynomial::derivative(int axis) const {
  Polynomial out;
  out.dim = dim;
  for (const auto& [e, coef] : terms) {
    int k = e[static_cast<size_t>(axis)];
    if (k == 0) continue;
    auto e2 = e;
    e2[static_cast<size_t>(axis)] = k - 1;
    out.terms.emplace_back(e2, coef * k);
  }
  return out;
}

Polynomial Polynomial::scaled(double factor) const {
  Polynomial out = *this;
  for (auto& [e, coef] : out.terms) coef *= factor;
  return out;
}

Polynomial Polynomial::times(const Polynomial& other) const {
  Polynomial out;
  out.dim = dim;
  for (const auto& [ea, ca] : terms)
    for (const auto& [eb, cb] : other.terms) {
      std::array<int, 3> e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
      out.terms.emplace_back(e, ca * cb);
    }
  out.combine_terms();
  return out;
}

Polynomial Polynomial::plus(const Polynomial& other) const {
  Polynomial out = *this;
  out.terms.insert(out.terms.end(), other.terms.begin(), other.terms.end());
  out.combine_terms();
  return out;
}

Polynomial Polynomial::times_coordinate(int axis) const {
  Polynomial out = *this;
  for (auto& [e, coef] : out.terms) e[static_cast<size_t>(axis)] += 1;
  return out;
}

void Polynomial::combine_terms() {
  std::map<std::array<int, 3>, double> acc;
  for (const auto& [e, coef] : terms) acc[e] += coef;
  terms.clear();
  for (const auto& [e, coef] : acc)
    if (coef != 0.0) terms.emplace_back(e, coef);
}

Polynomial Polynomial::constant(int dim, double value) {
  Polynomial out;
  out.dim = dim;
  out.terms.push_back({{0, 0, 0}, value});
  return out;
}

namespace {

double envelope_at(const double* x, int dim, double s) {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
  return std::exp(-r2 / (2.0 * s));
}

}  // namespace

double TestFunction::eval(const double* x) const {
  return scale * poly.eval(x) * envelope_at(x, poly.dim, envelope);
}

double TestFunction::eval_gradient(const double* x, int axis) const {
  // (p' - p x/s) * exp envelope, exact.
  double p = poly.eval(x);
  double dp = poly.derivative(axis).eval(x);
  return scale * (dp - p * x[axis] / envelope) * envelope_at(x, poly.dim, envelope);
}

double TestFunction::eval_laplacian(const double* x) const {
  double acc = 0.0;
  double p = poly.eval(x);
  const double s = envelope;
  for (int a = 0; a < poly.dim; ++a) {
    Polynomial da = poly.derivative(a);
    double dp = da.eval(x);
    double d2p = da.derivative(a).eval(x);
    // d^2/dx_a^2 [p e] = (p'' - 2 p' x/s - p/s + p x^2/s^2) e
    acc += d2p - 2.0 * dp * x[a] / s - p / s + p * x[a] * x[a] / (s * s);
  }
  return scale * acc * envelope_at(x, poly.dim, s);
}

std::vector<FamilyMember> family_members(int dim, double c, bool unweighted,
                                         int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("family count must be at least 1");
  std::vector<FamilyMember> out;
  out.reserve(static_cast<size_t>(count));
  for (int j = 0; j < count; ++j) {
    FamilyMember m;
    m.poly.dim = dim;
    std::uint64_t draw = 0;
    const auto member = static_cast<std::uint64_t>(j);
    // Keep s in [c/4, 0.45 c]: the 0.45 ceiling leaves tail margin so
    // boundary values drop below 1e-12 of the peak already at L = 6 sqrt(c).
    double u = rng::uniform(seed, member, 0, draw++, 0.0, 1.0);
    m.envelope = unweighted ? 0.5 + 0.5 * u : c * (0.25 + 0.20 * u);
    double coef_mass = 0.0;
    for (int i = 0; i <= 4; ++i)
      for (int k = 0; k <= (dim >= 2 ? 4 - i : 0); ++k)
        for (int l = 0; l <= (dim >= 3 ? 4 - i - k : 0); ++l) {
          double coef = rng::uniform(seed, member, 0, draw++, -1.0, 1.0);
          m.poly.terms.push_back({{i, k, l}, coef});
          coef_mass += std::abs(coef);
        }
    // Grid-independent normalization, so a member realized on nested grids
    // is the same continuous function at every refinement level.
    m.scale = 1.0 / (1.0 + coef_mass);
    out.push_back(std::move(m));
  }
  return out;
}

TestFunction realize(const FamilyMember& m, GridPtr grid) {
  TestFunction tf{GridFunction::zeros(grid), m.poly, m.envelope, m.scale};
  GridFunction raw = GridFunction::sample(grid, [&](const double* x) {
    return m.scale * m.poly.eval(x) * envelope_at(x, m.poly.dim, m.envelope);
  });
  if (raw.max_abs() == 0.0)
    throw std::runtime_error("degenerate test function (identically zero)");
  tf.values = std::move(raw);
  return tf;
}

std::vector<TestFunction> test_function_family(GridPtr grid, int count,
                                               std::uint64_t seed) {
  const auto& g = *grid;
  auto members = family_members(g.dim(), g.weight_param().c,
                                g.weight_param().unweighted, count, seed);
  std::vector<TestFunction> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(realize(m, grid));
  return out;
}

}  // namespace oulab
