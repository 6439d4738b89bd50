#pragma once

#include "semibound/catalog.hpp"
#include "semibound/ergodic.hpp"
#include "semibound/observables.hpp"
#include "semibound/types.hpp"

#include <string>
#include <vector>

namespace semibound {

struct PoissonConfig {
  SimulationConfig sim;
  long mu_paths = 0;          // 0: sim.paths
  double t0 = 1e-3;           // first node of the geometric time grid
  double grid_ratio = 1.25;
  double tail_tol = 1e-3;     // target tail contribution
  double max_T = 50.0;
  double grad_delta = 1e-2;
  double max_centering_se = 5e-3;
  double residual_eta = 0.1;  // stencil width for the generator check
};

struct PoissonPointValue {
  Vec x;
  double u = 0;
  double se = 0;        // Monte Carlo component
  double grad = 0;
  double grad_se = 0;
  double quad_err = 0;  // coarse-grid Richardson estimate
  double tail_err = 0;  // fitted-decay tail of the time integral
  double total_err() const { return 3 * se + quad_err + tail_err; }
};

struct PoissonSolution {
  std::vector<PoissonPointValue> points;
  double mu_f = 0;
  double mu_f_se = 0;
  double T_max = 0;
  DecayFit decay;
  std::vector<double> time_grid;
};

/**
 * Whole-space candidate solution by truncated time integration of the
 * recentred forcing along simulated paths.  Requires the model's ergodicity
 * gate: a dissipativity certificate and an integrable fitted decay law.
 */
PoissonSolution solve_poisson(const CatalogModel& model, const Observable& f,
                              const std::vector<Vec>& points,
                              const PoissonConfig& config);

struct ResidualPoint {
  Vec x;
  double residual = 0;  // generator applied to the numeric u, plus f
  double se = 0;
  double relative = 0;  // |residual| / sup|f| over the probe set
  bool inconclusive = false;
};

struct ResidualReport {
  std::vector<ResidualPoint> points;
  double sup_f = 0;
  double max_relative = 0;
};

/// Re-solves on a common-noise stencil around each point and applies the
/// generator by finite differences of the numeric solution.
ResidualReport residual_check(const CatalogModel& model, const Observable& f,
                              const std::vector<Vec>& points,
                              const PoissonConfig& config);

struct PoissonVerifyCell {
  Vec x;
  double measured = 0;  // |grad u|
  double se = 0;
  double rhs = 0;
  double ratio = 0;
};

struct PoissonVerifyReport {
  std::vector<PoissonVerifyCell> cells;
  double ratio_sup = 0;
  bool pass_finite = false;
};

PoissonVerifyReport poisson_gradient_verify(const CatalogModel& model,
                                            const Observable& f,
                                            const std::vector<Vec>& points,
                                            const PoissonConfig& config,
                                            double epsilon = 0.1);

}  // namespace semibound
