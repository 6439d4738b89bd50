#pragma once

#include "semibound/catalog.hpp"
#include "semibound/coeffs.hpp"
#include "semibound/observables.hpp"
#include "semibound/sde.hpp"
#include "semibound/summation.hpp"
#include "semibound/types.hpp"

#include <string>
#include <vector>

namespace semibound {

struct ErgodicConfig {
  SimulationConfig sim;
  double t_large_override = 0;  // 0: max(10, 5/|c0|)
  bool dissipativity_override = false;
  long lyap_samples = 1000;
  double sample_radius = 5.0;  // where the drift criterion is fitted
};

/**
 * Pooled terminal samples standing in for the invariant measure, together
 * with the Lyapunov certificate that justified the burn-in horizon.
 */
struct EmpiricalMeasure {
  Mat samples;  // paths x dim
  double t_large = 0;
  double c0 = kNaN;
  double c1 = kNaN;
  Vec mean;
  Vec variance;

  MeanSe observable_mean(const Observable& phi) const;
};

/// Refuses without a dissipativity certificate (fitted c0 < 0) unless
/// overridden.
EmpiricalMeasure estimate_invariant(const CatalogModel& model,
                                    const ErgodicConfig& config);

struct DecayFit {
  DecayLaw::Family family = DecayLaw::Family::exponential;
  double gamma = 0;
  double gamma_ci = 0;
  double scale = 1;
  double residual = 0;
  double window_lo = 0;
  double window_hi = 0;
  int points_used = 0;
  bool ok = false;
  std::string message;

  DecayLaw law() const { return DecayLaw{family, gamma, scale}; }
};

/**
 * Least-squares fit of log |T_t phi(x) - mu(phi)| against the requested decay
 * family, pooled over x_set with the rho1 normalization, on the window where
 * the signal clears 5 standard errors.
 */
DecayFit fit_decay(const CatalogModel& model, const Observable& phi,
                   const std::vector<Vec>& x_set,
                   std::span<const double> t_grid, DecayLaw::Family family,
                   double mu_hat, const SimulationConfig& config);

enum class DissipativityCase { a, b, c };

struct DissipativityParams {
  double gamma = 0.5;
  double vartheta = 0.5;
  double c = 1.0;
  double q = 2.0;
  double p = 2.0;  // case (a) power, or case (c) exponent in [1, q)
};

struct DissipativityCertificate {
  DissipativityCase which = DissipativityCase::a;
  bool holds = false;
  double largest_violation_radius = 0;  // 0 when the inequality holds
  double worst_margin = -kInf;          // max of LHS - RHS over samples
  LyapunovFit fit;                      // drift condition with the case's V form
  bool fit_run = false;
  std::string v_form;
};

/// Samples the case inequality on a radial grid up to |x| = 50 and, on
/// success, fits the drift condition with the prescribed V.
DissipativityCertificate dissipativity_catalog_check(
    const CatalogModel& model, DissipativityCase which,
    const DissipativityParams& params);

}  // namespace semibound
