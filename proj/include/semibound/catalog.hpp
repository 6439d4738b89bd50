#pragma once

#include "semibound/coeffs.hpp"
#include "semibound/sde.hpp"
#include "semibound/singular.hpp"
#include "semibound/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace semibound {

/**
 * A model with everything the verification pipeline consumes: coefficients
 * with closed-form local norms, weights, a Lyapunov candidate, and the
 * expected ergodic decay family.
 */
struct CatalogModel {
  CoefficientModel coeffs;
  WeightSpec weights;
  std::optional<LyapunovFunction> lyapunov;
  std::optional<DecayLaw::Family> ell1_family;
  std::optional<SingularDriftSpec> singular;
  std::string description;
};

std::vector<std::string> catalog_names();

/// Builds a catalog entry; params override model defaults (kappa, dimension,
/// Hoelder exponent of the singular potential, mollification level, ...).
CatalogModel catalog_get(const std::string& name);

/// heat: b = 0, sigma = I
CatalogModel make_heat(int dim = 1);
/// ou: b = -kappa x, sigma = I
CatalogModel make_ou(int dim = 1, double kappa = 1.0);
/// cubic: b = -x^3 componentwise, sigma = I, tamed scheme mandatory
CatalogModel make_cubic();
/// geometric_drift: b = -x / sqrt(1 + |x|^2), sigma = I
CatalogModel make_geometric_drift(int dim = 1);
/// singular_v: d = 1, b = mollified lacunary potential derivative + b2
CatalogModel make_singular_v(double alpha_prime = 0.6, int mollify_n = 16);

/// Inline one-dimensional polynomial-drift model with constant sigma.
CatalogModel make_poly_drift(const Vec& drift_coeffs, double sigma_const);

}  // namespace semibound
