#pragma once

#include "semibound/coeffs.hpp"
#include "semibound/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace semibound {

enum class Scheme { euler, tamed_euler };

struct SimulationConfig {
  Scheme scheme = Scheme::euler;
  double step = 1e-2;
  double horizon = 1.0;
  long paths = 10000;
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  int workers = 0;  // 0 = default_workers()
  double divergence_threshold = 1e8;
  double max_diverged_fraction = 0.01;
  double budget_cap = 2e10;  // paths * steps * copies
};

/**
 * Per-path scratch handed to the reduction callback: the state of every
 * common-random-number copy at every checkpoint, plus Jacobian matrices and
 * the Bismut martingale when requested.  Buffers are reused across paths.
 */
struct PathRecord {
  int copies = 1;
  int dim = 1;
  int n_checkpoints = 0;
  bool diverged = false;
  std::vector<Vec> states;    // [copy * n_checkpoints + k]
  std::vector<Mat> jacobians; // same layout, when enabled
  std::vector<Vec> bismut;    // same layout, when enabled
  std::vector<double> integrals;  // running int g(X_s) ds, when enabled

  const Vec& state(int copy, int k) const {
    return states[static_cast<std::size_t>(copy) * n_checkpoints + k];
  }
  const Mat& jacobian(int copy, int k) const {
    return jacobians[static_cast<std::size_t>(copy) * n_checkpoints + k];
  }
  const Vec& bismut_weight(int copy, int k) const {
    return bismut[static_cast<std::size_t>(copy) * n_checkpoints + k];
  }
  double integral(int copy, int k) const {
    return integrals[static_cast<std::size_t>(copy) * n_checkpoints + k];
  }
};

struct StepperOptions {
  bool jacobian = false;
  bool bismut = false;
  // left-endpoint Riemann accumulation of int g(X_s) ds along each copy
  std::function<double(const Vec&)> integrand;
};

using PathFn = std::function<void(long path, const PathRecord&)>;

/**
 * Euler / tamed-Euler driver for dX = b dt + sqrt(2) sigma dW.
 *
 * All copies share the path's noise sequence (common random numbers); noise
 * is a pure function of (seed, stream, path), so results are bit-identical
 * under any worker count.  Checkpoint times are snapped to the step grid;
 * the snapped times are returned.  Diverged paths are frozen and flagged;
 * once their fraction exceeds the configured cap the call throws.
 */
std::vector<double> simulate_paths(const CoefficientModel& model,
                                   const SimulationConfig& config,
                                   const std::vector<Vec>& x0s,
                                   std::span<const double> checkpoints,
                                   const StepperOptions& opts,
                                   const PathFn& per_path);

struct PathEnsemble {
  long paths = 0;
  int dim = 1;
  double horizon = 0;
  std::uint64_t seed = 0;     // with the counter-based substreams this pair
  std::uint32_t stream = 0;   // is the full per-path noise record
  Mat terminal;               // paths x dim
  std::vector<double> checkpoint_times;
  std::vector<Mat> checkpoint_states;  // per time, paths x dim
  std::vector<std::uint8_t> diverged;
  double diverged_fraction = 0;
};

PathEnsemble simulate(const CoefficientModel& model,
                      const SimulationConfig& config, const Vec& x0,
                      std::span<const double> checkpoints = {});

struct JacobianFlowResult {
  std::vector<double> times;
  // [path][time] d x d matrices
  std::vector<std::vector<Mat>> jacobians;
  Mat mean_at_terminal;  // averaged J_T over paths
};

JacobianFlowResult jacobian_flow(const CoefficientModel& model,
                                 const SimulationConfig& config, const Vec& x0,
                                 std::span<const double> times);

struct MomentReport {
  Vec x0;
  std::vector<double> times;
  std::vector<double> value;  // MC estimate of E rho0(X_t)
  std::vector<double> se;
  std::vector<double> bound;  // ell0(t) rho1(x0)
  std::vector<double> ratio;
  double max_ratio = 0;
};

/// Monte Carlo check of the moment envelope E rho0(X_t) <= ell0(t) rho1(x).
MomentReport moment_check(const CoefficientModel& model,
                          const SimulationConfig& config,
                          const WeightSpec& weights, const Vec& x0,
                          std::span<const double> times);

/// A twice-differentiable candidate function for the drift criterion, with
/// analytic gradient and Hessian.
struct LyapunovFunction {
  std::string form;
  ScalarField value;
  std::function<void(const Vec&, Vec&)> grad;
  std::function<void(const Vec&, Mat&)> hess;
};

/// V = 1 + |x|^2
LyapunovFunction quadratic_lyapunov(int dim);
/// V = exp(gamma (eps^2 + |x|^2)^{q/2}), smooth at the origin
LyapunovFunction exponential_lyapunov(int dim, double gamma, double q,
                                      double eps = 1.0);

struct LyapunovFit {
  double c0 = 0;
  double c1 = 0;
  bool feasible = false;
  double max_residual = 0;  // largest gap L V - (c0 V + c1), <= 0 if valid
  long samples = 0;
};

/**
 * Least-squares fit of the generator action L V = tr(a D^2 V) + b . grad V
 * against c0 V + c1 on the sample set, lifted to a pointwise certificate by
 * raising c1 to cover the worst residual.  Infeasible when the fitted c0
 * exceeds the cap.
 */
LyapunovFit lyapunov_fit(const CoefficientModel& model,
                         const LyapunovFunction& V,
                         const std::vector<Vec>& samples, double c0_cap = 10.0);

/// Generator action L V at x.
double generator_apply(const CoefficientModel& model,
                       const LyapunovFunction& V, const Vec& x);

}  // namespace semibound
