#include "schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oulab {

namespace {

double horner(const std::vector<double>& coeffs, double t) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
  return v;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Schedule Schedule::constant(double value, double horizon) {
  require(horizon > 0.0, "schedule horizon must be positive");
  Schedule s(ScheduleKind::Constant, horizon);
  s.params_ = {value};
  return s;
}

Schedule Schedule::linear(double a0, double a1, double horizon) {
  require(horizon > 0.0, "schedule horizon must be positive");
  Schedule s(ScheduleKind::Linear, horizon);
  s.params_ = {a0, a1};
  return s;
}

Schedule Schedule::polynomial(std::vector<double> coeffs, double horizon) {
  require(horizon > 0.0, "schedule horizon must be positive");
  require(!coeffs.empty(), "polynomial schedule needs coefficients");
  Schedule s(ScheduleKind::Polynomial, horizon);
  s.params_ = std::move(coeffs);
  return s;
}

Schedule Schedule::piecewise_constant(std::vector<double> values,
                                      std::vector<double> breaks, double horizon) {
  require(horizon > 0.0, "schedule horizon must be positive");
  require(!values.empty(), "piecewise schedule needs at least one value");
  require(values.size() == breaks.size() + 1,
          "piecewise schedule needs one more value than breakpoints");
  require(std::is_sorted(breaks.begin(), breaks.end()),
          "piecewise breakpoints must be sorted");
  for (double b : breaks)
    require(b > 0.0 && b < horizon, "piecewise breakpoints must lie inside (0, T)");
  Schedule s(ScheduleKind::PiecewiseConstant, horizon);
  s.params_ = std::move(values);
  s.knots_ = std::move(breaks);
  return s;
}

Schedule Schedule::tabulated(std::vector<double> times, std::vector<double> values,
                             double horizon) {
  require(horizon > 0.0, "schedule horizon must be positive");
  require(times.size() >= 2, "tabulated schedule needs at least two knots");
  require(times.size() == values.size(), "tabulated times/values size mismatch");
  require(std::is_sorted(times.begin(), times.end()),
          "tabulated times must be sorted");
  Schedule s(ScheduleKind::Tabulated, horizon);
  s.params_ = std::move(values);
  s.knots_ = std::move(times);
  return s;
}

Schedule Schedule::sqrt_polynomial(std::vector<double> coeffs, double horizon) {
  require(horizon > 0.0, "schedule horizon must be positive");
  require(!coeffs.empty(), "sqrt-polynomial schedule needs coefficients");
  Schedule s(ScheduleKind::SqrtPolynomial, horizon);
  s.params_ = std::move(coeffs);
  return s;
}

void Schedule::check_domain(double t) const {
  if (!(t >= 0.0 && t <= horizon_))
    throw std::domain_error("schedule evaluated outside [0, T]: t = " +
                            std::to_string(t));
}

double Schedule::operator()(double t) const {
  check_domain(t);
  switch (kind_) {
    case ScheduleKind::Constant:
      return params_[0];
    case ScheduleKind::Linear:
      return params_[0] + params_[1] * t;
    case ScheduleKind::Polynomial:
      return horner(params_, t);
    case ScheduleKind::PiecewiseConstant: {
      // Left-continuous: value i applies on (knots_[i-1], knots_[i]].
      auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
      return params_[static_cast<size_t>(it - knots_.begin())];
    }
    case ScheduleKind::Tabulated: {
      if (t <= knots_.front()) return params_.front();
      if (t >= knots_.back()) return params_.back();
      auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      size_t i = static_cast<size_t>(it - knots_.begin());
      double t0 = knots_[i - 1], t1 = knots_[i];
      double w = (t - t0) / (t1 - t0);
      return params_[i - 1] * (1.0 - w) + params_[i] * w;
    }
    case ScheduleKind::SqrtPolynomial: {
      double p = horner(params_, t);
      if (p < 0.0)
        throw std::domain_error("sqrt-polynomial schedule negative at t = " +
                                std::to_string(t));
      return std::sqrt(p);
    }
  }
  return 0.0;
}

double Schedule::squared(double t) const {
  if (kind_ == ScheduleKind::SqrtPolynomial) {
    check_domain(t);
    double p = horner(params_, t);
    if (p < 0.0)
      throw std::domain_error("sqrt-polynomial schedule negative at t = " +
                              std::to_string(t));
    return p;
  }
  double v = (*this)(t);
  return v * v;
}

std::vector<double> Schedule::critical_times() const { return knots_; }

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "constant") return ScheduleKind::Constant;
  if (s == "linear") return ScheduleKind::Linear;
  if (s == "polynomial") return ScheduleKind::Polynomial;
  if (s == "piecewise-constant") return ScheduleKind::PiecewiseConstant;
  if (s == "tabulated") return ScheduleKind::Tabulated;
  if (s == "sqrt-polynomial") return ScheduleKind::SqrtPolynomial;
  throw std::invalid_argument("unknown schedule kind '" + s + "'");
}

std::string to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::Polynomial: return "polynomial";
    case ScheduleKind::PiecewiseConstant: return "piecewise-constant";
    case ScheduleKind::Tabulated: return "tabulated";
    case ScheduleKind::SqrtPolynomial: return "sqrt-polynomial";
  }
  return "?";
}

WeightParam WeightParam::weighted(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("weight parameter c must be positive");
  return WeightParam{c, false};
}

WeightParam WeightParam::unit() { return WeightParam{1.0, true}; }

namespace {

// Sample times: uniform grid, both endpoints, plus every schedule knot.
std::vector<double> sample_times(const CoefficientSchedule& s, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
  std::vector<double> ts;
  ts.reserve(static_cast<size_t>(n_samples) + 8);
  const double T = s.horizon;
  for (int i = 0; i < n_samples; ++i)
    ts.push_back(T * static_cast<double>(i) / (n_samples - 1));
  for (double k : s.f.critical_times()) ts.push_back(k);
  for (double k : s.g.critical_times()) ts.push_back(k);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

}  // namespace

CoefficientSchedule::CoefficientSchedule(Schedule f_in, Schedule g_in)
    : f(std::move(f_in)), g(std::move(g_in)), horizon(f.horizon()) {
  if (f.horizon() != g.horizon())
    throw std::invalid_argument("f and g schedules disagree on the horizon");
  // Positivity is checked on the same dense sampling used everywhere else.
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    double t = horizon * static_cast<double>(i) / (n - 1);
    if (f(t) < 0.0)
      throw std::invalid_argument("f(t) must be nonnegative on [0, T]");
    if (!(g(t) > 0.0)) throw std::invalid_argument("g(t) must be positive on [0, T]");
  }
}

bool CoefficientSchedule::f_is_zero() const {
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    double t = horizon * static_cast<double>(i) / (n - 1);
    if (f(t) != 0.0) return false;
  }
  for (double k : f.critical_times())
    if (f(k) != 0.0) return false;
  return true;
}

std::pair<double, double> eval_coeffs(const CoefficientSchedule& s, double t) {
  return {s.f(t), s.g(t)};
}

double condition_slack(const CoefficientSchedule& s, const WeightParam& w, double t) {
  if (w.unweighted) return s.f(t) == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return s.f(t) - s.g_squared(t) / (2.0 * w.c);
}

ConditionReport check_condition(const CoefficientSchedule& s, const WeightParam& w,
                                int n_samples) {
  ConditionReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (double t : sample_times(s, n_samples)) {
    double slack = condition_slack(s, w, t);
    if (slack < rep.min_slack) {
      rep.min_slack = slack;
      rep.argmin_t = t;
    }
  }
  rep.holds = rep.min_slack >= -1e-12;
  return rep;
}

double minimal_c(const CoefficientSchedule& s, int n_samples) {
  double sup = 0.0;
  for (double t : sample_times(s, n_samples)) {
    double f = s.f(t);
    double g2 = s.g_squared(t);
    if (f <= 0.0) {
      if (g2 > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    sup = std::max(sup, g2 / (2.0 * f));
  }
  return sup;
}

ConstantsReport constants_report(const CoefficientSchedule& s, const WeightParam& w,
                                 int dim, int n_samples) {
  ConstantsReport rep;
  ConditionReport cond = check_condition(s, w, n_samples);
  rep.valid = cond.holds;

  const double doc = w.dim_over_c(dim);  // d/c (0 in unweighted mode)
  rep.M_d = std::max(1.0, doc);

  double min_g2 = std::numeric_limits<double>::infinity();
  double max_f = 0.0;
  const auto times = sample_times(s, n_samples);
  for (double t : times) {
    max_f = std::max(max_f, s.f(t));
    min_g2 = std::min(min_g2, s.g_squared(t));
  }
  rep.M_f = max_f;
  // Strictly inside the admissible range alpha < g^2(t)/2.
  rep.alpha = 0.5 * (min_g2 / 2.0);
  rep.K_A2 = dim * rep.M_f;

  // K_A3 bounds 2<v,Av> + alpha ||v||_V^2 <= K_A3 ||v||_H^2. Chain: the
  // pairing identity gives 2<v,Av> <= (d f + d g^2/(2c)) Q - g^2 G with
  // Q = int v^2 w, G = int |grad v|^2 w, and ||v||_V^2 = (1 - d/c) Q + 2 G.
  // The weighted Poincare bound G >= (d/c) Q absorbs the gradient terms:
  //   K_A3 = max_t [ alpha (1 + d/c) + d (f - g^2/(2c)) ].
  // In the unweighted (f == 0) regime the pairing is <= 0 and the V-norm
  // collapses to Q + 2G, leaving K_A3 = alpha.
  double k3 = -std::numeric_limits<double>::infinity();
  double k4 = 0.0;
  for (double t : times) {
    double f = s.f(t);
    double g2 = s.g_squared(t);
    double a3 = rep.alpha * (1.0 + doc) + dim * (f - g2 * w.inv_c() / 2.0);
    k3 = std::max(k3, a3);
    double cf = w.unweighted ? 0.0 : w.c * f;
    double a4 = cf * rep.M_d * rep.M_d + std::abs(g2 / 2.0 - cf) * rep.M_d;
    k4 = std::max(k4, a4);
  }
  rep.K_A3 = k3;
  rep.K_A4 = k4;
  return rep;
}

}  // namespace oulab
