#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "family.hpp"
#include "op.hpp"

namespace oulab {

// Residual of one integral identity on one grid. `residual` is the signed
// mismatch of the all-discrete route (discrete gradients and divergences);
// `exact_residual` re-evaluates both sides with the member's closed-form
// derivatives, so it isolates pure quadrature error and certifies the
// identity itself near machine precision. `scale` normalizes both.
struct IdentityResidual {
  double residual = 0.0;
  double scale = 1.0;
  double exact_residual = 0.0;
};

IdentityResidual lemma_3_1_residual(const TestFunction& v);
IdentityResidual lemma_3_2_residual(const TestFunction& v);
IdentityResidual lemma_3_3_residual(const TestFunction& v);

// Inequality margin; slack >= 0 means the bound holds (violation = -slack).
struct SlackSample {
  double slack = 0.0;
  double scale = 1.0;
};

SlackSample lemma_3_4_slack(const TestFunction& v, double t, const CoefficientSchedule& s);
SlackSample a2_slack(const TestFunction& v, double t, const CoefficientSchedule& s,
                     const ConstantsReport& consts);
SlackSample a3_slack(const TestFunction& v, double t, const CoefficientSchedule& s,
                     const ConstantsReport& consts);
SlackSample a4_slack(const TestFunction& v, double t, const CoefficientSchedule& s,
                     const ConstantsReport& consts,
                     std::span<const GridFunction> candidates);
SlackSample poincare_slack(const TestFunction& v);

enum class CheckId { Lemma31, Lemma32, Lemma33, Lemma34, A2, A3, A4, Poincare };

const char* check_name(CheckId id);
CheckId check_id_from_string(const std::string& name);

struct CheckReport {
  std::string name;
  // (points per axis, aggregate residual or worst violation) per level.
  std::vector<std::pair<int, double>> residuals;
  double observed_order = 0.0;   // least-squares log2 slope across levels
  double terminal_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool below_floor = false;  // residuals at round-off; order not measurable
  double adversarial_min_slack = 0.0;  // inequality checks only
  std::string detail;
};

struct BatterySettings {
  int dim = 1;
  double half_width = 8.0;
  WeightParam weight = WeightParam::weighted(1.0);
  std::vector<int> levels = {129, 257, 513};  // points per axis, ascending
  int family_count = 50;
  std::uint64_t seed = 1;
  double t = 0.5;                 // evaluation time for t-dependent checks
  int adversarial_iters = 200;
  double identity_tolerance = 1e-6;  // terminal relative residual (exact route)
  double order_window_lo = 1.7;
  double order_window_hi = 2.3;
  double ineq_slack_coeff = 1.0;  // violations allowed up to C * h^2 (relative)
  double floor_coeff = 1e-12;     // round-off floor per unit scale
};

CheckReport run_check(CheckId id, const CoefficientSchedule& s,
                      const BatterySettings& cfg);

// The full battery: lemmas 3.1-3.4, A2-A4, weighted Poincare.
std::vector<CheckReport> run_battery(const CoefficientSchedule& s,
                                     const BatterySettings& cfg);

// Domain-growth study for lemma 3.1: residual versus L at fixed spacing must
// decay at least as fast as exp(-L^2/(4c)) until it hits the round-off floor.
CheckReport lemma_3_1_domain_study(const CoefficientSchedule& s,
                                   const BatterySettings& cfg,
                                   const std::vector<double>& half_widths);

// Gauss-Hermite reference rule: sum_i w_i f(x_i) ~ int e^{-x^2} f(x) dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int n);

// Reference integral of poly(x) * exp(-a ||x||^2) over R^d via scaled
// Gauss-Hermite; exact for polynomial degree <= 2n-1.
double gauss_hermite_integral(const Polynomial& poly, double a, int n_nodes);

}  // namespace oulab
