#pragma once

#include "semibound/bounds.hpp"
#include "semibound/coeffs.hpp"
#include "semibound/observables.hpp"
#include "semibound/sde.hpp"
#include "semibound/summation.hpp"
#include "semibound/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace semibound {

enum class EstimatorKind { fd_crn, bismut };

/**
 * A Monte Carlo estimate of T_t phi or one of its spatial derivatives.
 * Order 0 stores a 1x1 value, order 1 a d-vector, order 2 a d x d matrix
 * (symmetric by stencil construction).  `bias` carries the Richardson
 * residual |v_delta - v_{2delta}|/3 for finite-difference estimators.
 */
struct DerivativeEstimate {
  int order = 0;
  Mat value;
  Mat se;
  Mat bias;
  double bump = 0;
  EstimatorKind estimator = EstimatorKind::fd_crn;
  long paths = 0;
  double diverged_fraction = 0;
  bool noise_floor_warning = false;

  double scalar() const { return value(0, 0); }
  double scalar_se() const { return se(0, 0); }
};

DerivativeEstimate estimate_semigroup(const CoefficientModel& model,
                                      const Observable& phi, double t,
                                      const Vec& x,
                                      const SimulationConfig& config);

/// Central difference on common random numbers; delta <= 0 picks
/// max(1e-3, sqrt(SE_0)) from a pilot run.
DerivativeEstimate estimate_gradient_fd(const CoefficientModel& model,
                                        const Observable& phi, double t,
                                        const Vec& x,
                                        const SimulationConfig& config,
                                        double delta = 0);

/// Derivative representation with the Jacobian-weighted stochastic integral;
/// requires invertible sigma along paths.
DerivativeEstimate estimate_gradient_bismut(const CoefficientModel& model,
                                            const Observable& phi, double t,
                                            const Vec& x,
                                            const SimulationConfig& config);

/// Second-order stencil on common random numbers (four-point off-diagonal).
DerivativeEstimate estimate_hessian_fd(const CoefficientModel& model,
                                       const Observable& phi, double t,
                                       const Vec& x,
                                       const SimulationConfig& config,
                                       double delta);

/// Gradient estimates at several times from one common-noise ensemble.
std::vector<DerivativeEstimate> estimate_gradient_series(
    const CoefficientModel& model, const Observable& phi,
    std::span<const double> times, const Vec& x, const SimulationConfig& config,
    double delta);

std::vector<DerivativeEstimate> estimate_hessian_series(
    const CoefficientModel& model, const Observable& phi,
    std::span<const double> times, const Vec& x, const SimulationConfig& config,
    double delta);

/// Pair-sampled Hoelder seminorm of the estimated Hessian over B_{1/2}(x).
double hessian_seminorm_mc(const CoefficientModel& model, const Observable& phi,
                           double t, const Vec& x, double beta,
                           const SimulationConfig& config, double delta,
                           int mesh_points = 32);

enum class BoundKind { grad_short, hess_short, grad_long, hess_long };

struct VerificationCell {
  double t = 0;
  Vec x;
  double measured = 0;
  double se = 0;
  double rhs = 0;
  double ratio = 0;
};

struct VerificationReport {
  BoundKind which = BoundKind::grad_short;
  std::vector<VerificationCell> cells;
  LineFit time_scaling;  // log measured vs log t (short legs)
  LineFit decay_rate;    // log measured vs t (long legs); slope = -rate
  LineFit rhs_tracking;  // log measured vs log rhs-decay (long legs)
  LineFit ratio_trend;   // log ratio vs log t
  double ratio_sup = 0;
  bool pass_finite = false;
  bool pass_no_uptrend = false;
  bool pass_scaling = true;
  std::optional<double> scaling_target;
  double scaling_tol = 0.05;
};

struct VerifyConfig {
  SimulationConfig sim;
  double delta = 1e-2;
  double epsilon = 0.1;
  std::optional<double> scaling_target;  // expected slope / decay rate
  double scaling_tol = 0.05;
  double ratio_trend_floor = -0.05;
  long norm_budget = 10000;
  double mu_hat = 0;  // centering value for long-time legs
};

/// Measures the derivative over a (t, x) grid, assembles the matching
/// right-hand sides, and fits the scaling legs.  Failures are recorded in
/// the pass flags, never thrown.
VerificationReport verify_bound(const CoefficientModel& model,
                                const WeightSpec& weights,
                                const Observable& phi,
                                std::span<const double> t_grid,
                                const std::vector<Vec>& x_grid, BoundKind which,
                                const VerifyConfig& cfg);

const char* bound_kind_name(BoundKind k);

}  // namespace semibound
