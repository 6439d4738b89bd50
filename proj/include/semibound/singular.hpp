#pragma once

#include "semibound/coeffs.hpp"
#include "semibound/observables.hpp"
#include "semibound/sde.hpp"
#include "semibound/summation.hpp"
#include "semibound/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace semibound {

/**
 * One-dimensional distributional drift b1 = V' for a lacunary trigonometric
 * potential V(x) = sum_j base^{-j alpha'} cos(base^j x + theta_j), plus a
 * locally Lipschitz component b2 of at most linear growth.  V is Hoelder of
 * exponent alpha'; the declared distribution order alpha_b is alpha' - 1
 * clamped into (-1, -1/2], which the lacunary family satisfies at the level
 * of its Fourier decay.
 */
struct SingularDriftSpec {
  double alpha_prime = 0.6;  // Hoelder exponent of V, in (0, 1)
  int levels = 14;           // highest frequency base^levels
  double base = 2.0;
  std::uint64_t phase_seed = 2024;

  double p_b = kInf;
  double q_b = kInf;

  std::function<double(double)> b2;  // optional, |b2(x)| <= c0 + c1 |x|
  double b2_c0 = 0;
  double b2_c1 = 0;

  double declared_alpha_b() const;
  double phase(int j) const;
  /// V itself (the finite lacunary sum).
  double potential(double x) const;
  /// Generic Hoelder potential hook; defaults to the lacunary sum.
  std::function<double(double)> custom_potential;
};

/// Smooth bump supported on (-1, 1) with unit mass, and its cosine transform.
double mollifier_bump(double x);
double mollifier_transform(double xi);

struct MollifiedDrift {
  int n = 1;
  double sup_bound = 0;  // sum of mollified mode amplitudes
  std::function<double(double)> eval;
};

/**
 * b_{1;n} = b1 * bump_n with bump_n(x) = n bump(n x), evaluated with the
 * derivative moved onto the mollifier.  For the lacunary family this is the
 * exact mode sum with transform-damped amplitudes; for a custom potential it
 * falls back to quadrature against the mollifier derivative.
 */
MollifiedDrift mollify(const SingularDriftSpec& spec, int n);

/// Full drift model b_{1;n} + b2 ready for simulation; the oscillatory part
/// is tabulated over one period for the stepping hot loop.
CoefficientModel mollified_model(const SingularDriftSpec& spec, int n,
                                 int table_size = 1 << 20);

struct CauchyReport {
  std::vector<int> n_values;  // distances pair n with 2n
  std::vector<double> distance;  // L2(Omega) estimates
  std::vector<double> se;
  LineFit log_slope;  // log distance vs log n
  bool decreasing = false;
  bool conclusive = false;
};

/// Pairwise L2 distances of the drift functionals A^{(n)}_t and A^{(2n)}_t,
/// each on its own mollified dynamics but on shared noise.
CauchyReport drift_functional_cauchy(const SingularDriftSpec& spec, double x0,
                                     double t, std::span<const int> n_list,
                                     const SimulationConfig& config);

struct KrylovFit {
  double m = 2;
  std::vector<double> window;     // t1 - t0
  std::vector<double> lm_norm;    // L^m(Omega) of the window integral
  double exponent = 0;            // fitted (1 + theta)/2
  double theta = 0;
  double exponent_ci = 0;
  double residual = 0;
  std::string f_name;
};

/// Window-scaling fit of || int f(X_s) ds ||_{L^m} over window sizes.
KrylovFit krylov_fit(const CoefficientModel& model, const Observable& f,
                     int m, std::span<const double> windows, double t_start,
                     const SimulationConfig& config);

struct UniformGradientCell {
  int n = 0;
  double t = 0;
  double x = 0;
  double measured = 0;
  double se = 0;
  double rhs = 0;  // (1 + |x| + t^{-1/2}) ||phi||_inf
  double ratio = 0;
};

struct UniformGradientReport {
  std::vector<UniformGradientCell> cells;
  LineFit ratio_vs_log_n;  // mean ratio per n against log n
  double ratio_sup = 0;
  bool pass_flat = false;
  bool pass_finite = false;
  double flat_tol = 0.05;
};

/// Mollification sweep of |grad T^(n)_t phi(x)| / ((1+|x|+t^{-1/2})||phi||),
/// shared noise across n; pass = no trend of the ratio in log n.
UniformGradientReport uniform_gradient_check(const SingularDriftSpec& spec,
                                             const Observable& phi,
                                             std::span<const double> t_grid,
                                             std::span<const double> x_grid,
                                             std::span<const int> n_list,
                                             const SimulationConfig& config,
                                             double delta, double flat_tol = 0.05);

}  // namespace semibound
