#include "grid.hpp"

#include <cmath>
#include <stdexcept>

namespace oulab {

WeightedGrid::WeightedGrid(int dim, double half_width, int points_per_axis,
                           WeightParam weight)
    : dim_(dim), half_width_(half_width), n_(points_per_axis), weight_(weight) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2, or 3");
  if (!(half_width > 0.0)) throw std::invalid_argument("grid half-width must be positive");
  if (n_ < 3 || n_ % 2 == 0)
    throw std::invalid_argument("points per axis must be odd and at least 3");
  h_ = 2.0 * half_width_ / (n_ - 1);

  if (!weight_.unweighted) {
    // Corner exponent d L^2 / (2c) must stay clear of double overflow.
    double corner_exp = dim_ * half_width_ * half_width_ / (2.0 * weight_.c);
    if (corner_exp > 690.0)
      throw std::invalid_argument(
          "weight overflows at the corners: d*L^2/(2c) exceeds exp range");
  }

  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<size_t>(n_);
  // Row-major: axis 0 slowest.
  strides_.fill(0);
  size_t s = 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    strides_[static_cast<size_t>(a)] = s;
    s *= static_cast<size_t>(n_);
  }

  axis_.resize(static_cast<size_t>(n_));
  axis_weight_.resize(static_cast<size_t>(n_));
  axis_trap_.resize(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    double x = -half_width_ + i * h_;
    axis_[static_cast<size_t>(i)] = x;
    axis_weight_[static_cast<size_t>(i)] =
        weight_.unweighted ? 1.0 : std::exp(x * x / (2.0 * weight_.c));
    axis_trap_[static_cast<size_t>(i)] = (i == 0 || i == n_ - 1) ? 0.5 * h_ : h_;
  }
}

std::array<int, 3> WeightedGrid::unflatten(size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[static_cast<size_t>(a)] = static_cast<int>(flat % static_cast<size_t>(n_));
    flat /= static_cast<size_t>(n_);
  }
  return idx;
}

size_t WeightedGrid::flatten(const std::array<int, 3>& idx) const {
  size_t flat = 0;
  for (int a = 0; a < dim_; ++a)
    flat = flat * static_cast<size_t>(n_) + static_cast<size_t>(idx[static_cast<size_t>(a)]);
  return flat;
}

void WeightedGrid::coords(size_t flat, double* x) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    x[a] = axis_[flat % static_cast<size_t>(n_)];
    flat /= static_cast<size_t>(n_);
  }
}

double WeightedGrid::weight_at(size_t flat) const {
  double w = 1.0;
  for (int a = dim_ - 1; a >= 0; --a) {
    w *= axis_weight_[flat % static_cast<size_t>(n_)];
    flat /= static_cast<size_t>(n_);
  }
  return w;
}

double WeightedGrid::quad_weight(size_t flat) const {
  double q = 1.0;
  for (int a = dim_ - 1; a >= 0; --a) {
    q *= axis_trap_[flat % static_cast<size_t>(n_)];
    flat /= static_cast<size_t>(n_);
  }
  return q;
}

bool WeightedGrid::is_boundary(size_t flat) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    int i = static_cast<int>(flat % static_cast<size_t>(n_));
    if (i == 0 || i == n_ - 1) return true;
    flat /= static_cast<size_t>(n_);
  }
  return false;
}

bool WeightedGrid::compatible(const WeightedGrid& other) const {
  return dim_ == other.dim_ && n_ == other.n_ && half_width_ == other.half_width_ &&
         weight_.unweighted == other.weight_.unweighted &&
         (weight_.unweighted || weight_.c == other.weight_.c);
}

GridPtr make_grid(int dim, double half_width, int points_per_axis, WeightParam weight) {
  return std::make_shared<const WeightedGrid>(dim, half_width, points_per_axis, weight);
}

GridFunction::GridFunction(GridPtr grid) : grid_(std::move(grid)) {
  values_.assign(grid_->size(), 0.0);
}

GridFunction GridFunction::zeros(GridPtr grid) { return GridFunction(std::move(grid)); }

GridFunction GridFunction::sample(GridPtr grid,
                                  const std::function<double(const double*)>& f) {
  GridFunction out(std::move(grid));
  const auto& g = *out.grid_;
  double x[3] = {0, 0, 0};
  for (size_t i = 0; i < out.values_.size(); ++i) {
    g.coords(i, x);
    out.values_[i] = f(x);
  }
  return out;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void check_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!a.grid()->compatible(*b.grid()))
    throw std::invalid_argument("grid mismatch between grid functions");
}

double weight_eval(const WeightedGrid& grid, const std::array<int, 3>& node) {
  for (int a = 0; a < grid.dim(); ++a) {
    int i = node[static_cast<size_t>(a)];
    if (i < 0 || i >= grid.points_per_axis())
      throw std::out_of_range("node index outside grid");
  }
  return grid.weight_at(grid.flatten(node));
}

double weighted_l2_inner(const GridFunction& v, const GridFunction& u) {
  check_same_grid(v, u);
  const auto& g = *v.grid();
  double acc = 0.0;
  for (size_t i = 0; i < v.size(); ++i)
    acc += g.quad_weight(i) * g.weight_at(i) * v[i] * u[i];
  return acc;
}

double weighted_l2_norm_sq(const GridFunction& v) { return weighted_l2_inner(v, v); }

double integral(const GridFunction& v) {
  const auto& g = *v.grid();
  double acc = 0.0;
  for (size_t i = 0; i < v.size(); ++i) acc += g.quad_weight(i) * v[i];
  return acc;
}

namespace {

// Applies fn(base, stride) for every grid line along `axis`.
template <typename Fn>
void for_each_line(const WeightedGrid& g, int axis, Fn&& fn) {
  const int n = g.points_per_axis();
  const size_t stride = g.stride(axis);
  const size_t total = g.size();
  const size_t line_span = stride * static_cast<size_t>(n);
  for (size_t block = 0; block < total; block += line_span)
    for (size_t off = 0; off < stride; ++off) fn(block + off, stride);
}

}  // namespace

GridFunction derivative(const GridFunction& v, int axis) {
  const auto& g = *v.grid();
  const int n = g.points_per_axis();
  const double h = g.spacing();
  GridFunction da = GridFunction::zeros(v.grid());
  for_each_line(g, axis, [&](size_t base, size_t s) {
    auto at = [&](int i) { return v[base + s * static_cast<size_t>(i)]; };
    auto put = [&](int i, double val) { da[base + s * static_cast<size_t>(i)] = val; };
    put(0, (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h));
    for (int i = 1; i < n - 1; ++i) put(i, (at(i + 1) - at(i - 1)) / (2.0 * h));
    put(n - 1, (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h));
  });
  return da;
}

std::vector<GridFunction> gradient(const GridFunction& v) {
  std::vector<GridFunction> out;
  out.reserve(static_cast<size_t>(v.grid()->dim()));
  for (int a = 0; a < v.grid()->dim(); ++a) out.push_back(derivative(v, a));
  return out;
}

std::vector<GridFunction> ou_gradient(const GridFunction& v) {
  const auto& g = *v.grid();
  const double inv_c = g.weight_param().inv_c();
  std::vector<GridFunction> out = gradient(v);
  if (inv_c == 0.0) return out;
  for (int a = 0; a < g.dim(); ++a) {
    GridFunction& da = out[static_cast<size_t>(a)];
    for_each_line(g, a, [&](size_t base, size_t s) {
      for (int i = 0; i < g.points_per_axis(); ++i) {
        size_t idx = base + s * static_cast<size_t>(i);
        da[idx] += g.axis_coord(i) * inv_c * v[idx];
      }
    });
  }
  return out;
}

double v_norm_sq(const GridFunction& v) {
  double acc = weighted_l2_norm_sq(v);
  for (const auto& d : gradient(v)) acc += weighted_l2_norm_sq(d);
  for (const auto& d : ou_gradient(v)) acc += weighted_l2_norm_sq(d);
  return acc;
}

double v_norm(const GridFunction& v) { return std::sqrt(v_norm_sq(v)); }

}  // namespace oulab
