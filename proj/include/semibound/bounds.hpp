#pragma once

#include "semibound/coeffs.hpp"
#include "semibound/types.hpp"

#include <optional>
#include <string>

namespace semibound {

/// Which derivative a scale selection targets.
enum class DerivCase { gradient, hessian };

/**
 * Everything the bound calculus needs at one (t, x): local coefficient norms,
 * pointwise ellipticity, exponents, weights, and the observable norm.  All
 * unnamed absolute constants are normalized to 1; comparisons downstream are
 * ratio-based only.
 */
struct BoundInputs {
  double t = 1;
  Vec x;
  LocalNormReport norms;
  double lambda = 1;
  double Lambda = 1;
  double alpha = 1;
  double p_b = kInf;
  double q_b = kInf;
  int dim = 1;
  double epsilon = 0.1;
  double horizon_S = kNaN;  // NaN: defaults to (0, 2t)
  double horizon_T = kNaN;
  WeightSpec weights;
  double phi_norm = 1.0;
  double ll2_constant = 0;  // comparability certificate, 0 = absent
  double q_override = 0;    // advanced interpolation knobs, 0 = default
  double p_override = 0;

  double Lambda1() const { return Lambda + 1.0; }
  double theta_b() const { return 1.0 - (p_b == kInf ? 0.0 : dim / p_b); }
  double theta_b_time() const {
    return theta_b() - (q_b == kInf ? 0.0 : 2.0 / q_b);
  }
  double S() const { return std::isnan(horizon_S) ? 0.0 : horizon_S; }
  double T() const { return std::isnan(horizon_T) ? 2.0 * t : horizon_T; }
};

inline constexpr const char* kConstantConvention = "C=1, compare by ratio";

/// Short-time gradient scale function.
double gamma_t(const BoundInputs& in);
/// Short-time Hessian scale function (Hoelder drift variant).
double gamma_tilde_t(const BoundInputs& in);
/// Window-adapted gradient scale on the horizon (S, T).
double cal_g(const BoundInputs& in);
/// Window-adapted Hessian scale on the horizon (S, T).
double cal_h(const BoundInputs& in);
/// Base radius R0 and intrinsic radius R for the requested derivative case;
/// R <= R0 always.
std::pair<double, double> radius_select(const BoundInputs& in, DerivCase c);

/// Assembled right-hand sides, constants normalized to 1.
double grad_rhs(const BoundInputs& in);
double hess_rhs(const BoundInputs& in, double beta);
double longtime_grad_rhs(const BoundInputs& in);
double longtime_hess_rhs(const BoundInputs& in, double beta);
double poisson_grad_rhs(const BoundInputs& in);
double schauder_rhs(const BoundInputs& in);

struct BoundReport {
  double t = 0;
  Vec x;
  double Gamma_t = 0;
  double GammaTilde_t = 0;
  double calG_t = 0;
  double calH = 0;
  double R0 = 0;
  double R = 0;
  double grad_rhs = 0;
  double hess_rhs = 0;
  std::optional<double> longtime_grad_rhs;
  std::optional<double> longtime_hess_rhs;
  std::optional<double> poisson_grad_rhs;
  std::optional<double> schauder_rhs;
  std::string constant_convention = kConstantConvention;
};

/// Evaluates every bound function at (t, x); long-time and Poisson entries
/// are filled only when the weights carry a usable decay law.
BoundReport assemble_bound_report(const BoundInputs& in);

/// Convenience: builds BoundInputs for a model at (t, x) using closed-form
/// norms where the model has them.
BoundInputs make_bound_inputs(const CoefficientModel& model,
                              const WeightSpec& weights, double t, const Vec& x,
                              double phi_norm = 1.0, long norm_budget = 10000);

}  // namespace semibound
