#pragma once

#include "semibound/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace semibound {

enum class DriftGrowth { bounded, linear, superlinear };

using DriftFn = std::function<void(double, const Vec&, Vec&)>;
using SigmaFn = std::function<void(double, const Vec&, Mat&)>;
using GradDriftFn = std::function<void(double, const Vec&, Mat&)>;
using ScalarField = std::function<double(const Vec&)>;

/**
 * A diffusion model dX = b dt + sqrt(2) sigma dW together with the analytic
 * metadata the bound calculus consumes: the Hoelder exponent of a = sigma
 * sigma^T, the drift integrability exponent, and (when available in closed
 * form) the local ellipticity functions and local norms on unit balls.
 * Closed forms override sampling-based estimation wherever present.
 */
struct CoefficientModel {
  std::string name = "custom";
  int dim = 1;
  DriftFn drift;
  SigmaFn sigma;
  GradDriftFn grad_drift;  // optional; finite differences otherwise

  double alpha = 1.0;      // Hoelder exponent of a, in (0,1]
  double p_b = kInf;       // drift integrability exponent, in (d, inf]
  double q_b = kInf;       // time integrability (catalog models are static)
  bool time_homogeneous = true;
  bool constant_sigma = true;
  DriftGrowth drift_growth = DriftGrowth::bounded;

  ScalarField lambda_fn;   // optional pointwise ellipticity bounds
  ScalarField Lambda_fn;

  // optional closed-form local norms on B_1(x)
  ScalarField holder_a_fn;  // [a]_{C^alpha(B_1(x))}
  ScalarField lp_b_fn;      // ||b||_{L^{p_b}(B_1(x))}
  ScalarField holder_b_fn;  // ||b||_{C^alpha(B_1(x))}

  double ll2_constant = 0;  // ellipticity comparability constant, 0 = no certificate

  void eval_drift(double t, const Vec& x, Vec& out) const { drift(t, x, out); }
  void eval_sigma(double t, const Vec& x, Mat& out) const { sigma(t, x, out); }
  void eval_a(double t, const Vec& x, Mat& out) const;
  void eval_grad_drift(double t, const Vec& x, Mat& out) const;

  double theta_b() const { return p_b == kInf ? 1.0 : 1.0 - dim / p_b; }
};

/// Parametric decay/growth laws used for the moment and ergodicity envelopes.
struct DecayLaw {
  enum class Family { exponential, polynomial };
  Family family = Family::exponential;
  double gamma = 1;  // rate
  double scale = 1;

  double operator()(double t) const;
  /// int_T^inf of the law; +inf when not integrable.
  double tail_integral(double T) const;
  bool integrable() const;
  static const char* family_name(Family f);
};

/**
 * Weight data (rho_0, rho_1, ell_0, ell_1) entering the moment envelope
 * E rho_0(X_t) <= ell_0(t) rho_1(x) and the ergodic envelope.  ell_0 is
 * synthesized from a Lyapunov pair (c0, c1) as exp(max(c0,0) t) + |c1| t
 * when no explicit form is supplied.
 */
struct WeightSpec {
  ScalarField rho0;
  ScalarField rho1;
  std::function<double(double)> ell0;       // increasing, >= 1
  std::optional<DecayLaw> ell1;             // decreasing, optional
  ScalarField sup_rho1_ball;                // closed-form sup_{B_1(x)} rho1
  double w_constant = 0;                    // weight-class constant, 0 = unset
  double lyap_c0 = kNaN;                    // provenance of ell0 when fitted
  double lyap_c1 = kNaN;

  bool has_ell1() const { return ell1.has_value(); }
  double eval_ell0(double t) const;
  double eval_sup_rho1(const Vec& x, std::uint64_t seed = 7) const;
};

WeightSpec unit_weights();
/// ell_0 synthesized from a Lyapunov pair per the convention above.
std::function<double(double)> ell0_from_lyapunov(double c0, double c1);

enum class NormMethod { closed_form, pair_sampling, quadrature };

struct LocalNormReport {
  Vec center;
  double alpha = 1;
  double holder_a = 0;  // [a]_{C^alpha(B_1(x))}
  double lp_b = 0;      // ||b||_{L^{p_b}(B_1(x))}
  double holder_b = 0;  // ||b||_{C^alpha(B_1(x))} = sup + seminorm
  long sample_count = 0;
  NormMethod method = NormMethod::closed_form;
  bool unbounded_above_budget = false;
};

using VectorField = std::function<Vec(const Vec&)>;

/**
 * Pair-sampled Hoelder seminorm of f over the unit ball around x: the max of
 * |f(y)-f(y')| / |y-y'|^alpha over `pairs` sampled pairs.  A lower estimate
 * of the true seminorm, monotone in the pair budget for a fixed seed.
 */
double local_holder_seminorm(const VectorField& f, const Vec& x, double alpha,
                             long pairs, std::uint64_t seed = 1);

/// L^p norm of |b| over B_1(x): low-discrepancy quadrature (p < inf) or a
/// sampled sup (p = inf).
double local_lp_norm(const VectorField& b, const Vec& x, double p, long nodes,
                     std::uint64_t seed = 1);

/// ||b||_{C^alpha(B_1(x))}: sampled sup plus pair-sampled seminorm.
double local_holder_norm(const VectorField& b, const Vec& x, double alpha,
                         long pairs, std::uint64_t seed = 1);

/// max over the grid of |phi(x)| / rho0(x).
double weighted_sup_norm(const ScalarField& phi, const ScalarField& rho0,
                         const std::vector<Vec>& grid);

/// Axis-aligned space-time box (S,T) x prod_i (lo_i, hi_i).
struct SpaceTimeBox {
  double t0 = 0;
  double t1 = 1;
  Vec lo;
  Vec hi;
};

/**
 * Anisotropic norm ( int_I ( int_O |u|^p dx )^{q/p} dt )^{1/q} by iterated
 * trapezoidal quadrature on a tensor grid, with the usual sup conventions at
 * p = inf or q = inf.
 */
double anisotropic_norm(const std::function<double(double, const Vec&)>& u,
                        double q, double p, const SpaceTimeBox& cyl,
                        int nodes_per_axis = 256);

/// Local norms at x, honoring the model's closed forms where present.
LocalNormReport estimate_local_norms(const CoefficientModel& model,
                                     const Vec& x, long budget = 10000,
                                     std::uint64_t seed = 1);

/// Samples the weight-class inequality c0 rho <= inf_B1 rho <= sup_B1 rho <=
/// rho / c0 at x; returns the largest admissible c0 found.
double weight_class_constant(const ScalarField& rho, const Vec& x,
                             long samples = 512, std::uint64_t seed = 11);

/// Deterministic low-discrepancy points in the unit ball around x.
std::vector<Vec> ball_points(const Vec& x, double radius, long count,
                             std::uint64_t seed = 1);

}  // namespace semibound
