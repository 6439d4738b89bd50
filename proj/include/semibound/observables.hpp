#pragma once

#include "semibound/types.hpp"

#include <functional>
#include <string>

namespace semibound {

/**
 * Scalar observables acting on the first coordinate of the state.
 *
 * Closed-form oracles dispatch on `kind`; the Monte Carlo side only uses
 * `value`.  Derivatives are present where the family has them (smooth
 * kinds), and are what the Gaussian/OU oracles differentiate analytically.
 */
enum class ObsKind { poly, sin, cos, sign, indicator, tanh, custom };

struct Observable {
  ObsKind kind = ObsKind::custom;
  std::string name = "custom";
  Vec poly_coeffs;        // poly: phi(u) = sum_k c[k] u^k, degree <= 4
  double threshold = 0;   // indicator: phi(u) = 1{u >= threshold}
  double sup_norm = kInf; // finite for bounded observables

  std::function<double(double)> fn;   // custom only
  std::function<double(double)> dfn;  // custom first derivative (optional)
  std::function<double(double)> d2fn; // custom second derivative (optional)

  double operator()(const Vec& x) const { return eval(x[0]); }

  double eval(double u) const;
  bool smooth() const;
  double deriv1(double u) const;  // only meaningful when smooth()
  double deriv2(double u) const;
};

Observable make_observable(const std::string& name);
Observable make_poly(const Vec& coeffs);
Observable make_indicator(double threshold);

}  // namespace semibound
