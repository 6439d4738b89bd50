#pragma once

#include "semibound/coeffs.hpp"
#include "semibound/observables.hpp"
#include "semibound/types.hpp"

#include <string>
#include <vector>

namespace semibound {

/// Parabolic cylinder (t - R^2, t + R^2) x B_R(x).
struct CylinderSpec {
  double t = 0;
  Vec x;
  double R = 1;

  double t_lo() const { return t - R * R; }
  double t_hi() const { return t + R * R; }
};

/// E g(mean + sd Z) for standard normal Z, by adaptive quadrature.
double gauss_expect(const std::function<double(double)>& g, double mean,
                    double sd, double rel_tol = 1e-8);

/// Semigroup value for constant diffusion a: E phi(x + sqrt(2 t a) Z).
double gaussian_semigroup_exact(const Observable& phi, double t, double x,
                                double a_const, double rel_tol = 1e-8);

/// First or second x-derivative of the same quantity, with the derivative
/// moved onto the Gaussian weight so kinked observables stay integrable.
double gaussian_semigroup_derivative(const Observable& phi, int order, double t,
                                     double x, double a_const,
                                     double rel_tol = 1e-8);

struct OuClosedForm {
  double value = 0;
  double gradient = 0;
  double hessian = 0;
};

/**
 * Closed-form action of the dX = -kappa X dt + sqrt(2) dW semigroup on the
 * supported observable families: X_t ~ N(e^{-kappa t} x, (1-e^{-2 kappa t})
 * / kappa), with analytic first and second x-derivatives.  Smooth families
 * without algebraic forms (tanh, custom with derivatives) are reduced to
 * Gaussian quadrature of the chain rule.
 */
OuClosedForm ou_closed_form(const Observable& phi, double kappa, double t,
                            double x);

struct GridSolution {
  Vec xs;
  std::vector<double> taus;  // elapsed time since the terminal condition
  Mat u;                     // taus.size() x xs.size()
  double box_lo = 0;
  double box_hi = 0;
  double contamination_width = 0;  // exclude this margin near the box edges
  std::string boundary_policy = "one-sided extrapolation";
  bool maximum_principle_ok = true;
  double phi_min = 0;
  double phi_max = 0;

  /// Bilinear evaluation; throws DomainError inside the contamination zone.
  double eval(double tau, double x, bool allow_contaminated = false) const;
  double interior_lo() const { return box_lo + contamination_width; }
  double interior_hi() const { return box_hi - contamination_width; }
};

/**
 * Backward Kolmogorov solve for a one-dimensional model, reported in elapsed
 * time: u(tau, .) approximates the semigroup applied to phi after time tau.
 * Implicit time stepping; artificial box edges use one-sided extrapolation
 * and the returned contamination width 4 sqrt(2 Lambda T) marks the zone to
 * exclude from comparisons.
 */
GridSolution solve_kolmogorov_fd(const CoefficientModel& model,
                                 const Observable& phi, double T, double box_lo,
                                 double box_hi, int nodes, int steps);

}  // namespace semibound
