#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "schedule.hpp"

namespace oulab {

// Uniform tensor grid on [-L, L]^d carrying the weight w(x) = exp(||x||^2/(2c))
// and trapezoid quadrature weights. n is odd so x = 0 is a node; construction
// rejects grids whose corner weight would overflow.
class WeightedGrid {
 public:
  WeightedGrid(int dim, double half_width, int points_per_axis, WeightParam weight);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return n_; }
  double spacing() const { return h_; }
  const WeightParam& weight_param() const { return weight_; }
  size_t size() const { return size_; }

  double axis_coord(int i) const { return axis_[static_cast<size_t>(i)]; }
  size_t stride(int axis) const { return strides_[static_cast<size_t>(axis)]; }

  std::array<int, 3> unflatten(size_t flat) const;
  size_t flatten(const std::array<int, 3>& idx) const;

  void coords(size_t flat, double* x) const;
  double weight_at(size_t flat) const;      // w(x), 1 in unweighted mode
  double quad_weight(size_t flat) const;    // h^d times trapezoid factors
  bool is_boundary(size_t flat) const;

  bool compatible(const WeightedGrid& other) const;

 private:
  int dim_;
  double half_width_;
  int n_;
  double h_;
  WeightParam weight_;
  size_t size_;
  std::array<size_t, 3> strides_{};
  std::vector<double> axis_;         // node coordinates per axis
  std::vector<double> axis_weight_;  // exp(x_i^2/(2c)) per axis node
  std::vector<double> axis_trap_;    // h * (1/2 at ends, 1 inside)
};

using GridPtr = std::shared_ptr<const WeightedGrid>;

GridPtr make_grid(int dim, double half_width, int points_per_axis, WeightParam weight);

// Real values on a WeightedGrid; the discrete stand-in for v in V. Values are
// immutable by convention once built (all operations return new functions).
class GridFunction {
 public:
  static GridFunction zeros(GridPtr grid);
  // Samples a continuous function at all nodes, boundary included.
  static GridFunction sample(GridPtr grid,
                             const std::function<double(const double*)>& f);

  const GridPtr& grid() const { return grid_; }
  size_t size() const { return values_.size(); }
  double operator[](size_t i) const { return values_[i]; }
  double& operator[](size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double max_abs() const;
  bool all_finite() const;

 private:
  explicit GridFunction(GridPtr grid);
  GridPtr grid_;
  std::vector<double> values_;
};

void check_same_grid(const GridFunction& a, const GridFunction& b);

double weight_eval(const WeightedGrid& grid, const std::array<int, 3>& node);

// Trapezoid quadrature of v*u*w (the H inner product) and of plain v.
double weighted_l2_inner(const GridFunction& v, const GridFunction& u);
double weighted_l2_norm_sq(const GridFunction& v);
double integral(const GridFunction& v);  // unweighted

// Second-order central difference along one axis, one-sided second-order on
// the boundary layer.
GridFunction derivative(const GridFunction& v, int axis);

// All d components of the discrete gradient.
std::vector<GridFunction> gradient(const GridFunction& v);

// grad v + (x/c) v, the product-rule form of grad(v w) / w. Never forms v*w,
// which overflows in the tails.
std::vector<GridFunction> ou_gradient(const GridFunction& v);

// sqrt( |v|_H^2 + sum_k |d_k v|_H^2 + sum_k |ou_k v|_H^2 ).
double v_norm(const GridFunction& v);
double v_norm_sq(const GridFunction& v);

}  // namespace oulab
