#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "grid.hpp"

namespace oulab {

// Sparse multivariate polynomial in up to 3 variables (degree <= 4 in the
// family). Carries exact derivative algebra so tests and the verify module
// can evaluate analytic gradients of family members.
struct Polynomial {
  int dim = 1;
  // (exponents per axis, coefficient)
  std::vector<std::pair<std::array<int, 3>, double>> terms;

  double eval(const double* x) const;
  Polynomial derivative(int axis) const;
  Polynomial scaled(double factor) const;
  Polynomial times(const Polynomial& other) const;
  Polynomial plus(const Polynomial& other) const;
  Polynomial times_coordinate(int axis) const;  // multiply by x_axis
  void combine_terms();

  static Polynomial constant(int dim, double value);
};

// Family member v(x) = scale * p(x) * exp(-||x||^2 / (2 s)). The envelope
// scale s stays at or below c/2 so v^2 w is integrable with margin and the
// boundary values are negligible for L >= 6 sqrt(c).
struct TestFunction {
  GridFunction values;
  Polynomial poly;
  double envelope = 1.0;  // s
  double scale = 1.0;

  double eval(const double* x) const;
  double eval_gradient(const double* x, int axis) const;
  // div(grad v), analytic.
  double eval_laplacian(const double* x) const;
};

// Analytic description independent of any grid; realize() samples it.
struct FamilyMember {
  Polynomial poly;
  double envelope = 1.0;
  double scale = 1.0;
};

std::vector<FamilyMember> family_members(int dim, double c, bool unweighted,
                                         int count, std::uint64_t seed);

TestFunction realize(const FamilyMember& m, GridPtr grid);

// Deterministic pseudo-random family on the given grid; identical for equal
// (grid, count, seed).
std::vector<TestFunction> test_function_family(GridPtr grid, int count,
                                               std::uint64_t seed);

}  // namespace oulab
