#include "doctest.h"

#include <cmath>

#include "grid.hpp"
#include "oracles.hpp"

using namespace oulab;

TEST_CASE("grid construction invariants") {
  CHECK_THROWS_AS(make_grid(1, 8.0, 4, WeightParam::weighted(1.0)),
                  std::invalid_argument);  // even n
  CHECK_THROWS_AS(make_grid(1, 8.0, 1, WeightParam::weighted(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 8.0, 5, WeightParam::weighted(1.0)),
                  std::invalid_argument);
  // corner weight overflow: d L^2 / (2c) = 1600
  CHECK_THROWS_AS(make_grid(1, 40.0, 5, WeightParam::weighted(0.5)),
                  std::invalid_argument);

  auto g = make_grid(1, 8.0, 17, WeightParam::weighted(1.0));
  CHECK(g->spacing() == doctest::Approx(1.0));
  CHECK(g->axis_coord(8) == 0.0);  // odd n keeps x = 0 on the grid
}

TEST_CASE("weight evaluation at nodes") {
  auto g1 = make_grid(1, 8.0, 17, WeightParam::weighted(1.0));
  CHECK(weight_eval(*g1, {8, 0, 0}) == 1.0);                         // x = 0
  CHECK(weight_eval(*g1, {9, 0, 0}) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-14));              // x = 1

  auto g2 = make_grid(2, 2.0, 5, WeightParam::weighted(1.0));
  CHECK(weight_eval(*g2, {3, 3, 0}) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-14));              // (1,1)
  CHECK_THROWS_AS(weight_eval(*g2, {7, 0, 0}), std::out_of_range);

  auto gu = make_grid(1, 8.0, 17, WeightParam::unit());
  CHECK(weight_eval(*gu, {16, 0, 0}) == 1.0);
}

TEST_CASE("weighted inner product: zero, symmetry, closed form") {
  auto g = make_grid(1, 8.0, 513, WeightParam::weighted(1.0));
  auto z = GridFunction::zeros(g);
  CHECK(weighted_l2_inner(z, z) == 0.0);

  // standard normal density: int phi^2 w dx = 1/sqrt(2 pi)
  auto phi = GridFunction::sample(
      g, [](const double* x) { return oracles::normal_peak(1.0) * std::exp(-x[0] * x[0] / 2.0); });
  double val = weighted_l2_inner(phi, phi);
  CHECK(val == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-10));
  CHECK(val == doctest::Approx(oracles::normal_density_weighted_mass(1.0, 1.0))
                   .epsilon(1e-10));

  auto psi = GridFunction::sample(
      g, [](const double* x) { return std::exp(-x[0] * x[0]) * (1.0 + x[0]); });
  CHECK(weighted_l2_inner(phi, psi) == weighted_l2_inner(psi, phi));
  CHECK(weighted_l2_inner(psi, psi) > 0.0);

  auto other = GridFunction::zeros(make_grid(1, 8.0, 129, WeightParam::weighted(1.0)));
  CHECK_THROWS_AS(weighted_l2_inner(phi, other), std::invalid_argument);
}

TEST_CASE("integrability boundary: sigma^2 >= 2c diverges with L") {
  // N(0, 3c) against exp(x^2/2c): the quadrature value must grow with L
  double prev = 0.0;
  for (double L : {4.0, 6.0, 8.0}) {
    int n = 513;
    auto g = make_grid(1, L, n, WeightParam::weighted(1.0));
    auto v = GridFunction::sample(g, [](const double* x) {
      return oracles::normal_peak(3.0) * std::exp(-x[0] * x[0] / 6.0);
    });
    double val = weighted_l2_inner(v, v);
    CHECK(val > prev);
    prev = val;
  }
}

TEST_CASE("gradient stencils") {
  auto g = make_grid(1, 8.0, 129, WeightParam::weighted(1.0));

  // constant on the interior with zero boundary: zero two layers in
  auto v = GridFunction::sample(g, [](const double*) { return 1.0; });
  v[0] = v[v.size() - 1] = 0.0;
  auto dv = gradient(v);
  for (size_t i = 2; i < v.size() - 2; ++i) CHECK(dv[0][i] == 0.0);

  // exact for linears everywhere, one-sided stencils included
  auto lin = GridFunction::sample(g, [](const double* x) { return x[0]; });
  auto dlin = gradient(lin);
  for (size_t i = 0; i < lin.size(); ++i)
    CHECK(dlin[0][i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gradient converges at second order") {
  double errs[3];
  int idx = 0;
  for (int n : {129, 257, 513}) {
    auto g = make_grid(1, 8.0, n, WeightParam::weighted(1.0));
    const double L = g->half_width();
    auto v = GridFunction::sample(
        g, [L](const double* x) { return std::sin(M_PI * x[0] / L); });
    auto dv = gradient(v);
    double err = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      double x = g->axis_coord(static_cast<int>(i));
      err = std::max(err, std::abs(dv[0][i] - M_PI / L * std::cos(M_PI * x / L)));
    }
    errs[idx++] = err;
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("ou_gradient product-rule form") {
  auto g = make_grid(1, 8.0, 257, WeightParam::weighted(1.0));
  const double h = g->spacing();

  // v = w^{-1}: v w is constant, so the OU gradient vanishes (up to h^2)
  auto winv = GridFunction::sample(
      g, [](const double* x) { return std::exp(-x[0] * x[0] / 2.0); });
  auto q = ou_gradient(winv);
  CHECK(q[0].max_abs() <= 1.0 * h * h);

  // v = 1 on the deep interior: ou gradient is x/c there
  auto one = GridFunction::sample(g, [](const double*) { return 1.0; });
  auto q1 = ou_gradient(one);
  for (size_t i = 4; i < one.size() - 4; ++i)
    CHECK(q1[0][i] ==
          doctest::Approx(g->axis_coord(static_cast<int>(i))).epsilon(1e-12));

  // v = exp(-x^2), c = 1: ou grad = -x exp(-x^2) (symbolic oracle)
  auto e = GridFunction::sample(g, [](const double* x) { return std::exp(-x[0] * x[0]); });
  auto qe = ou_gradient(e);
  double err = 0.0;
  for (size_t i = 0; i < e.size(); ++i) {
    double x = g->axis_coord(static_cast<int>(i));
    err = std::max(err, std::abs(qe[0][i] - (-x * std::exp(-x * x))));
  }
  CHECK(err <= 2.0 * h * h);

  // unweighted grids reduce the OU gradient to the plain gradient
  auto gu = make_grid(1, 8.0, 129, WeightParam::unit());
  auto vu = GridFunction::sample(gu, [](const double* x) { return std::exp(-x[0] * x[0]); });
  auto qu = ou_gradient(vu);
  auto du = gradient(vu);
  for (size_t i = 0; i < vu.size(); ++i) CHECK(qu[0][i] == du[0][i]);
}

TEST_CASE("v_norm: zero, homogeneity, frozen stationary value") {
  auto g = make_grid(1, 8.0, 513, WeightParam::weighted(1.0));
  CHECK(v_norm(GridFunction::zeros(g)) == 0.0);

  auto v = GridFunction::sample(
      g, [](const double* x) { return std::exp(-x[0] * x[0]) * (1.0 + 0.3 * x[0]); });
  auto v2 = v;
  for (size_t i = 0; i < v2.size(); ++i) v2[i] *= -2.0;
  CHECK(v_norm(v2) == doctest::Approx(2.0 * v_norm(v)).epsilon(1e-14));

  // N(0,1) at c = 1: Q = G = 1/sqrt(2 pi) and the OU term vanishes
  // (sigma^2 = c), so ||v||_V = sqrt(2/sqrt(2 pi)).
  auto gf = make_grid(1, 8.0, 2049, WeightParam::weighted(1.0));
  auto phi = GridFunction::sample(gf, [](const double* x) {
    return oracles::normal_peak(1.0) * std::exp(-x[0] * x[0] / 2.0);
  });
  CHECK(v_norm(phi) ==
        doctest::Approx(std::sqrt(2.0 / std::sqrt(2.0 * M_PI))).epsilon(1e-7));
}

TEST_CASE("trapezoid quadrature matches Gaussian closed forms to 1e-10") {
  // Gaussian-times-polynomial integrands with s <= c/2 and L = 8 sqrt(c)
  auto g = make_grid(1, 8.0, 513, WeightParam::weighted(1.0));
  const double s = 0.5;
  const double a = 1.0 / s;  // integrand decay exp(-a x^2 / ...) via x^{2k} e^{-x^2/s}
  for (int k : {0, 1, 2, 3}) {
    auto f = GridFunction::sample(g, [&](const double* x) {
      return std::pow(x[0], 2 * k) * std::exp(-x[0] * x[0] / s);
    });
    double closed = oracles::gaussian_moment(k, a);
    CHECK(integral(f) == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("grid function snapshots stay finite and flag boundary") {
  auto g = make_grid(2, 4.0, 9, WeightParam::weighted(1.0));
  CHECK(g->size() == 81);
  size_t boundary = 0;
  for (size_t i = 0; i < g->size(); ++i)
    if (g->is_boundary(i)) ++boundary;
  CHECK(boundary == 81 - 49);  // all but the 7x7 interior

  auto v = GridFunction::sample(g, [](const double* x) { return x[0] + 10 * x[1]; });
  CHECK(v.all_finite());
  auto idx = g->unflatten(40);
  CHECK(g->flatten(idx) == 40);
}
