#include "semibound/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace semibound {

namespace {

void require_elliptic(const BoundInputs& in) {
  if (!(in.lambda > 0))
    throw ArgumentError("ellipticity lower bound must be positive");
  if (!(in.Lambda >= in.lambda))
    throw ArgumentError("ellipticity bounds must satisfy lambda <= Lambda");
}

// shared bracket term for the a-coefficient
double a_term(const BoundInputs& in) {
  return in.Lambda1() * std::pow(in.norms.holder_a, 1.0 / in.alpha) /
         std::pow(in.lambda, 1.0 + 1.0 / in.alpha);
}

double sqrt_t_cap(double t) { return std::sqrt(std::min(t, 1.0)); }

}  // namespace

double gamma_t(const BoundInputs& in) {
  require_elliptic(in);
  const double theta = in.theta_b();
  if (!(theta > 0))
    throw DomainError("integrability exponent regime: need 1 - d/p_b > 0");
  const double b_term = std::pow(in.norms.lp_b / in.lambda, 1.0 / theta);
  return sqrt_t_cap(in.t) * (a_term(in) + b_term) + in.Lambda1() / in.lambda;
}

double gamma_tilde_t(const BoundInputs& in) {
  require_elliptic(in);
  if (!std::isfinite(in.norms.holder_b))
    throw ArgumentError("holder norm of the drift is not finite");
  const double b_term = in.norms.holder_b / in.lambda;
  return sqrt_t_cap(in.t) * (a_term(in) + b_term) + in.Lambda1() / in.lambda;
}

namespace {

void require_window(const BoundInputs& in) {
  const double S = in.S(), T = in.T();
  if (!(S < T)) throw ArgumentError("horizon must satisfy S < T");
  if (in.t < (T + S) / 2 || in.t >= T)
    throw DomainError("time must lie in [(T+S)/2, T)");
}

double window_cap(const BoundInputs& in) {
  return std::min(std::sqrt(in.T() - in.S()), 1.0);
}

}  // namespace

double cal_g(const BoundInputs& in) {
  require_elliptic(in);
  require_window(in);
  const double theta = in.theta_b_time();
  if (!(theta > 0))
    throw DomainError("integrability exponent regime: need 1 - d/p_b - 2/q_b > 0");
  const double lam_eff =
      in.lambda / (in.q_b == kInf ? 1.0 : std::pow(in.Lambda1(), 1.0 / in.q_b));
  const double b_term = std::pow(in.norms.lp_b / lam_eff, 1.0 / theta);
  return window_cap(in) * (a_term(in) + b_term) + in.Lambda1() / in.lambda;
}

double cal_h(const BoundInputs& in) {
  require_elliptic(in);
  require_window(in);
  const double b_term = in.norms.holder_b / in.lambda;
  return window_cap(in) * (a_term(in) + b_term) + in.Lambda1() / in.lambda;
}

std::pair<double, double> radius_select(const BoundInputs& in, DerivCase c) {
  require_window(in);
  const double R0 =
      std::sqrt(in.T() - in.t) / std::max(std::sqrt(in.T() - in.S()), 1.0);
  const double scale = c == DerivCase::gradient ? cal_g(in) : cal_h(in);
  const double R = in.Lambda1() * R0 / (in.lambda * scale);
  return {R0, R};
}

namespace {

// exponent pair (Lambda1 power, ratio power); the defaults realize the
// epsilon-calibrated interpolation, the overrides expose (q, p) directly
std::pair<double, double> grad_exponents(const BoundInputs& in) {
  if (in.q_override > 0 && in.p_override > 0) {
    const double inv_q = 1.0 / in.q_override;
    return {inv_q, in.dim / in.p_override + 2.0 * inv_q};
  }
  const double dp = in.p_b == kInf ? 0.0 : in.dim / in.p_b;
  return {in.epsilon, 3.0 * in.epsilon + dp};
}

void require_weights(const BoundInputs& in) {
  if (!in.weights.rho0 || !in.weights.rho1)
    throw ConfigError("bound evaluation requires rho0/rho1 weights");
}

double envelope(const BoundInputs& in) {
  require_weights(in);
  return in.weights.eval_ell0(2.0 * in.t) * in.weights.eval_sup_rho1(in.x) *
         in.phi_norm;
}

}  // namespace

double grad_rhs(const BoundInputs& in) {
  if (!(in.epsilon > 0)) throw ArgumentError("epsilon must be positive");
  const auto [e1, e2] = grad_exponents(in);
  const double ratio = in.Lambda1() / in.lambda;
  return std::pow(in.Lambda1(), e1) * (gamma_t(in) / sqrt_t_cap(in.t)) *
         std::pow(ratio, e2) * envelope(in);
}

double hess_rhs(const BoundInputs& in, double beta) {
  if (beta != 0.0 && beta != in.alpha)
    throw ArgumentError("beta must be 0 or alpha");
  if (!(in.ll2_constant > 0))
    throw AssumptionError(
        "hessian bound needs the local ellipticity comparability certificate");
  const double core = gamma_tilde_t(in) / sqrt_t_cap(in.t);
  return std::pow(core, 2.0 + beta) * envelope(in);
}

namespace {

BoundInputs at_unit_time(const BoundInputs& in) {
  BoundInputs one = in;
  one.t = 1.0;
  one.horizon_S = kNaN;
  one.horizon_T = kNaN;
  return one;
}

double ell1_factor(const BoundInputs& in) {
  if (!in.weights.has_ell1())
    throw ConfigError("long-time bound requires an ell1 decay law");
  if (!(in.t > 2)) throw DomainError("long-time bound requires t > 2");
  return (*in.weights.ell1)(in.t - 1.0);
}

}  // namespace

double longtime_grad_rhs(const BoundInputs& in) {
  return ell1_factor(in) * grad_rhs(at_unit_time(in));
}

double longtime_hess_rhs(const BoundInputs& in, double beta) {
  return ell1_factor(in) * hess_rhs(at_unit_time(in), beta);
}

namespace {

void require_integrable_ell1(const BoundInputs& in) {
  if (!in.weights.has_ell1() || !in.weights.ell1->integrable())
    throw AssumptionError(
        "Poisson-type bound requires an integrable ell1 decay law");
}

}  // namespace

double poisson_grad_rhs(const BoundInputs& in) {
  require_integrable_ell1(in);
  const BoundInputs one = at_unit_time(in);
  const auto [e1, e2] = grad_exponents(one);
  const double ratio = one.Lambda1() / one.lambda;
  require_weights(one);
  return gamma_t(one) * std::pow(one.Lambda1(), e1) * std::pow(ratio, e2) *
         one.weights.eval_sup_rho1(one.x) * one.phi_norm;
}

double schauder_rhs(const BoundInputs& in) {
  require_integrable_ell1(in);
  require_weights(in);
  const BoundInputs one = at_unit_time(in);
  const double gt = gamma_tilde_t(one);
  return (std::pow(gt, 2.0 + in.alpha) * in.weights.rho1(in.x) +
          in.weights.rho0(in.x) / in.lambda) *
         in.phi_norm;
}

BoundReport assemble_bound_report(const BoundInputs& in) {
  BoundReport r;
  r.t = in.t;
  r.x = in.x;
  r.Gamma_t = gamma_t(in);
  r.GammaTilde_t = gamma_tilde_t(in);
  r.calG_t = cal_g(in);
  r.calH = cal_h(in);
  const auto [R0, R] = radius_select(in, DerivCase::gradient);
  r.R0 = R0;
  r.R = R;
  r.grad_rhs = grad_rhs(in);
  if (in.ll2_constant > 0) r.hess_rhs = hess_rhs(in, 0.0);
  if (in.weights.has_ell1() && in.t > 2) {
    r.longtime_grad_rhs = longtime_grad_rhs(in);
    if (in.ll2_constant > 0) r.longtime_hess_rhs = longtime_hess_rhs(in, 0.0);
  }
  if (in.weights.has_ell1() && in.weights.ell1->integrable()) {
    r.poisson_grad_rhs = poisson_grad_rhs(in);
    if (in.ll2_constant > 0) r.schauder_rhs = schauder_rhs(in);
  }
  return r;
}

BoundInputs make_bound_inputs(const CoefficientModel& model,
                              const WeightSpec& weights, double t, const Vec& x,
                              double phi_norm, long norm_budget) {
  BoundInputs in;
  in.t = t;
  in.x = x;
  in.dim = model.dim;
  in.alpha = model.alpha;
  in.p_b = model.p_b;
  in.q_b = model.q_b;
  in.norms = estimate_local_norms(model, x, norm_budget);
  if (model.lambda_fn && model.Lambda_fn) {
    in.lambda = model.lambda_fn(x);
    in.Lambda = model.Lambda_fn(x);
  } else {
    // spectral bounds of a at x as a fallback
    Mat a;
    model.eval_a(0.0, x, a);
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    in.lambda = es.eigenvalues().minCoeff();
    in.Lambda = es.eigenvalues().maxCoeff();
  }
  in.weights = weights;
  in.phi_norm = phi_norm;
  in.ll2_constant = model.ll2_constant;
  return in;
}

}  // namespace semibound
