#include "semibound/observables.hpp"

#include <cmath>

namespace semibound {

double Observable::eval(double u) const {
  switch (kind) {
    case ObsKind::poly: {
      double acc = 0;
      for (Eigen::Index k = poly_coeffs.size() - 1; k >= 0; --k)
        acc = acc * u + poly_coeffs[k];
      return acc;
    }
    case ObsKind::sin:
      return std::sin(u);
    case ObsKind::cos:
      return std::cos(u);
    case ObsKind::sign:
      return u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0);
    case ObsKind::indicator:
      return u >= threshold ? 1.0 : 0.0;
    case ObsKind::tanh:
      return std::tanh(u);
    case ObsKind::custom:
      return fn(u);
  }
  return kNaN;
}

bool Observable::smooth() const {
  switch (kind) {
    case ObsKind::poly:
    case ObsKind::sin:
    case ObsKind::cos:
    case ObsKind::tanh:
      return true;
    case ObsKind::custom:
      return static_cast<bool>(dfn);
    default:
      return false;
  }
}

double Observable::deriv1(double u) const {
  switch (kind) {
    case ObsKind::poly: {
      double acc = 0;
      for (Eigen::Index k = poly_coeffs.size() - 1; k >= 1; --k)
        acc = acc * u + k * poly_coeffs[k];
      return acc;
    }
    case ObsKind::sin:
      return std::cos(u);
    case ObsKind::cos:
      return -std::sin(u);
    case ObsKind::tanh: {
      const double t = std::tanh(u);
      return 1.0 - t * t;
    }
    case ObsKind::custom:
      return dfn ? dfn(u) : kNaN;
    default:
      return kNaN;
  }
}

double Observable::deriv2(double u) const {
  switch (kind) {
    case ObsKind::poly: {
      double acc = 0;
      for (Eigen::Index k = poly_coeffs.size() - 1; k >= 2; --k)
        acc = acc * u + k * (k - 1) * poly_coeffs[k];
      return acc;
    }
    case ObsKind::sin:
      return -std::sin(u);
    case ObsKind::cos:
      return -std::cos(u);
    case ObsKind::tanh: {
      const double t = std::tanh(u);
      return -2.0 * t * (1.0 - t * t);
    }
    case ObsKind::custom:
      return d2fn ? d2fn(u) : kNaN;
    default:
      return kNaN;
  }
}

Observable make_observable(const std::string& name) {
  Observable o;
  o.name = name;
  if (name == "sin") {
    o.kind = ObsKind::sin;
    o.sup_norm = 1;
  } else if (name == "cos") {
    o.kind = ObsKind::cos;
    o.sup_norm = 1;
  } else if (name == "sign") {
    o.kind = ObsKind::sign;
    o.sup_norm = 1;
  } else if (name == "tanh") {
    o.kind = ObsKind::tanh;
    o.sup_norm = 1;
  } else if (name == "indicator") {
    o.kind = ObsKind::indicator;
    o.sup_norm = 1;
  } else if (name == "x") {
    o.kind = ObsKind::poly;
    o.poly_coeffs = Vec::Zero(2);
    o.poly_coeffs[1] = 1;
  } else if (name == "x2") {
    o.kind = ObsKind::poly;
    o.poly_coeffs = Vec::Zero(3);
    o.poly_coeffs[2] = 1;
  } else if (name == "x2m1") {
    o.kind = ObsKind::poly;
    o.poly_coeffs = Vec::Zero(3);
    o.poly_coeffs[0] = -1;
    o.poly_coeffs[2] = 1;
  } else {
    throw ArgumentError("unknown observable: " + name);
  }
  return o;
}

Observable make_poly(const Vec& coeffs) {
  if (coeffs.size() == 0 || coeffs.size() > 5)
    throw ArgumentError("polynomial observables support degree <= 4");
  Observable o;
  o.kind = ObsKind::poly;
  o.name = "poly";
  o.poly_coeffs = coeffs;
  return o;
}

Observable make_indicator(double threshold) {
  Observable o;
  o.kind = ObsKind::indicator;
  o.name = "indicator";
  o.threshold = threshold;
  o.sup_norm = 1;
  return o;
}

}  // namespace semibound
