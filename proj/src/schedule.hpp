#pragma once

#include <limits>
#include <string>
#include <vector>

namespace oulab {

// Scalar time functions on [0, T]. The sqrt-polynomial kind evaluates to
// sqrt(p(t)) but reports p(t) exactly from squared(), which keeps ratios
// like g^2/(2f) free of rounding noise for variance-preserving schedules.
enum class ScheduleKind {
  Constant,
  Linear,
  Polynomial,
  PiecewiseConstant,
  Tabulated,
  SqrtPolynomial,
};

class Schedule {
 public:
  static Schedule constant(double value, double horizon);
  static Schedule linear(double a0, double a1, double horizon);
  static Schedule polynomial(std::vector<double> coeffs, double horizon);
  // values.size() == breaks.size() + 1; value i applies on (breaks[i-1], breaks[i]]
  // (left-continuous), with the first piece also covering t = 0.
  static Schedule piecewise_constant(std::vector<double> values,
                                     std::vector<double> breaks, double horizon);
  // Linear interpolation between (times[i], values[i]); clamped outside the
  // knot range so the schedule is defined on all of [0, T].
  static Schedule tabulated(std::vector<double> times, std::vector<double> values,
                            double horizon);
  static Schedule sqrt_polynomial(std::vector<double> coeffs, double horizon);

  double operator()(double t) const;
  double squared(double t) const;
  double horizon() const { return horizon_; }
  ScheduleKind kind() const { return kind_; }

  // Knots that sampling must not miss (piece breaks, table times).
  std::vector<double> critical_times() const;

 private:
  Schedule(ScheduleKind kind, double horizon) : kind_(kind), horizon_(horizon) {}
  void check_domain(double t) const;

  ScheduleKind kind_;
  double horizon_ = 0.0;
  std::vector<double> params_;
  std::vector<double> knots_;
};

ScheduleKind schedule_kind_from_string(const std::string& s);
std::string to_string(ScheduleKind k);

// Weight parameter of w(x) = exp(||x||^2 / (2c)). The unweighted mode
// (w == 1) is the separate regime used when f vanishes identically.
struct WeightParam {
  double c = 1.0;
  bool unweighted = false;

  static WeightParam weighted(double c);
  static WeightParam unit();

  // d/c with the unweighted mode counting as c = infinity.
  double dim_over_c(int dim) const { return unweighted ? 0.0 : dim / c; }
  double inv_c() const { return unweighted ? 0.0 : 1.0 / c; }
};

// The pair (f, g) plus horizon. g must be positive; f nonnegative, with
// f == 0 allowed as the special unweighted case.
struct CoefficientSchedule {
  Schedule f;
  Schedule g;
  double horizon;

  CoefficientSchedule(Schedule f_in, Schedule g_in);

  double f_at(double t) const { return f(t); }
  double g_squared(double t) const { return g.squared(t); }
  bool f_is_zero() const;
};

std::pair<double, double> eval_coeffs(const CoefficientSchedule& s, double t);

struct ConditionReport {
  bool holds = false;
  double min_slack = 0.0;
  double argmin_t = 0.0;
};

// Condition slack f(t) - g^2(t)/(2c) sampled densely; holds when the minimum
// stays above -1e-12.
ConditionReport check_condition(const CoefficientSchedule& s, const WeightParam& w,
                                int n_samples = 10000);

double condition_slack(const CoefficientSchedule& s, const WeightParam& w, double t);

// sup_t g^2/(2f); +infinity when f vanishes somewhere g does not.
double minimal_c(const CoefficientSchedule& s, int n_samples = 10000);

struct ConstantsReport {
  bool valid = false;
  double M_f = 0.0;   // max f
  double M_d = 1.0;   // max(1, d/c)
  double alpha = 0.0;
  double K_A2 = 0.0;
  double K_A3 = 0.0;
  double K_A4 = 0.0;
};

ConstantsReport constants_report(const CoefficientSchedule& s, const WeightParam& w,
                                 int dim, int n_samples = 10000);

}  // namespace oulab
