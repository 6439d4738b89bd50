#include "semibound/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace semibound {

namespace {

SigmaFn identity_sigma(int dim) {
  return [dim](double, const Vec&, Mat& out) {
    out = Mat::Identity(dim, dim);
  };
}

void unit_ellipticity(CoefficientModel& m) {
  m.lambda_fn = [](const Vec&) { return 1.0; };
  m.Lambda_fn = [](const Vec&) { return 1.0; };
  m.holder_a_fn = [](const Vec&) { return 0.0; };
  m.ll2_constant = 1.0;
  m.constant_sigma = true;
}

WeightSpec quadratic_weights(int dim, double ell0_c0, double ell0_c1) {
  WeightSpec w;
  w.rho0 = [](const Vec& x) { return 1.0 + x.squaredNorm(); };
  w.rho1 = w.rho0;
  w.sup_rho1_ball = [](const Vec& x) {
    const double r = x.norm() + 1.0;
    return 1.0 + r * r;
  };
  w.ell0 = ell0_from_lyapunov(ell0_c0, ell0_c1);
  w.lyap_c0 = ell0_c0;
  w.lyap_c1 = ell0_c1;
  w.w_constant = 0.4;
  (void)dim;
  return w;
}

}  // namespace

CatalogModel make_heat(int dim) {
  CatalogModel cm;
  cm.coeffs.name = "heat";
  cm.coeffs.dim = dim;
  cm.coeffs.drift = [](double, const Vec&, Vec& out) { out.setZero(); };
  cm.coeffs.grad_drift = [](double, const Vec&, Mat& out) { out.setZero(); };
  cm.coeffs.sigma = identity_sigma(dim);
  unit_ellipticity(cm.coeffs);
  cm.coeffs.lp_b_fn = [](const Vec&) { return 0.0; };
  cm.coeffs.holder_b_fn = [](const Vec&) { return 0.0; };
  cm.weights = unit_weights();
  cm.lyapunov = quadratic_lyapunov(dim);
  cm.description = "b = 0, sigma = I; no invariant measure";
  return cm;
}

CatalogModel make_ou(int dim, double kappa) {
  CatalogModel cm;
  cm.coeffs.name = "ou";
  cm.coeffs.dim = dim;
  cm.coeffs.drift = [kappa](double, const Vec& x, Vec& out) {
    out = -kappa * x;
  };
  cm.coeffs.grad_drift = [kappa, dim](double, const Vec&, Mat& out) {
    out = -kappa * Mat::Identity(dim, dim);
  };
  cm.coeffs.sigma = identity_sigma(dim);
  unit_ellipticity(cm.coeffs);
  cm.coeffs.drift_growth = DriftGrowth::linear;
  cm.coeffs.lp_b_fn = [kappa](const Vec& x) {
    return kappa * (x.norm() + 1.0);
  };
  cm.coeffs.holder_b_fn = [kappa](const Vec& x) {
    return kappa * (x.norm() + 1.0) + kappa;
  };
  cm.weights = quadratic_weights(dim, -2.0 * kappa, 2.0 * dim + 2.0 * kappa);
  cm.lyapunov = quadratic_lyapunov(dim);
  cm.ell1_family = DecayLaw::Family::exponential;
  cm.description = "b = -kappa x, sigma = I; exponentially ergodic";
  return cm;
}

CatalogModel make_cubic() {
  CatalogModel cm;
  cm.coeffs.name = "cubic";
  cm.coeffs.dim = 1;
  cm.coeffs.drift = [](double, const Vec& x, Vec& out) {
    out[0] = -x[0] * x[0] * x[0];
  };
  cm.coeffs.grad_drift = [](double, const Vec& x, Mat& out) {
    out(0, 0) = -3.0 * x[0] * x[0];
  };
  cm.coeffs.sigma = identity_sigma(1);
  unit_ellipticity(cm.coeffs);
  cm.coeffs.drift_growth = DriftGrowth::superlinear;
  cm.coeffs.lp_b_fn = [](const Vec& x) {
    const double r = std::abs(x[0]) + 1.0;
    return r * r * r;
  };
  cm.coeffs.holder_b_fn = [](const Vec& x) {
    const double r = std::abs(x[0]) + 1.0;
    return r * r * r + 3.0 * r * r;
  };
  // L(1+x^2) = 2 - 2 x^4 <= -2 (1+x^2) + 4.5
  cm.weights = quadratic_weights(1, -2.0, 4.5);
  cm.lyapunov = quadratic_lyapunov(1);
  cm.ell1_family = DecayLaw::Family::exponential;
  cm.description = "b = -x^3, sigma = I; tamed scheme required";
  return cm;
}

CatalogModel make_geometric_drift(int dim) {
  CatalogModel cm;
  cm.coeffs.name = "geometric_drift";
  cm.coeffs.dim = dim;
  cm.coeffs.drift = [](double, const Vec& x, Vec& out) {
    out = -x / std::sqrt(1.0 + x.squaredNorm());
  };
  cm.coeffs.sigma = identity_sigma(dim);
  unit_ellipticity(cm.coeffs);
  cm.coeffs.lp_b_fn = [](const Vec& x) {
    const double r = x.norm() + 1.0;
    return r / std::sqrt(1.0 + r * r);
  };
  cm.coeffs.holder_b_fn = [](const Vec& x) {
    const double r = x.norm() + 1.0;
    const double inner = std::max(x.norm() - 1.0, 0.0);
    const double lip = std::pow(1.0 + inner * inner, -1.5) +
                       1.0 / std::sqrt(1.0 + inner * inner);
    return r / std::sqrt(1.0 + r * r) + lip;
  };
  WeightSpec w;
  w.rho0 = [](const Vec& x) { return 1.0 + x.squaredNorm(); };
  w.rho1 = [](const Vec& x) {
    const double r2 = x.squaredNorm();
    return 1.0 + r2 * r2;
  };
  w.sup_rho1_ball = [](const Vec& x) {
    const double r = x.norm() + 1.0;
    return 1.0 + r * r * r * r;
  };
  // L(1+|x|^2) = 2 tr a - 2|x|^2 / sqrt(1+|x|^2) <= 2 d
  w.ell0 = ell0_from_lyapunov(0.0, 2.0 * dim);
  w.lyap_c0 = 0.0;
  w.lyap_c1 = 2.0 * dim;
  w.w_constant = 0.2;
  cm.weights = w;
  cm.lyapunov = exponential_lyapunov(dim, 0.25, 1.0);
  cm.ell1_family = DecayLaw::Family::polynomial;
  cm.description =
      "b = -x/sqrt(1+|x|^2), sigma = I; geometric drift, polynomial rate";
  return cm;
}

CatalogModel make_singular_v(double alpha_prime, int mollify_n) {
  SingularDriftSpec spec;
  spec.alpha_prime = alpha_prime;
  CatalogModel cm;
  cm.coeffs = mollified_model(spec, mollify_n);
  cm.coeffs.name = "singular_v";
  cm.weights = unit_weights();
  cm.singular = spec;
  cm.description =
      "d = 1, b = mollified lacunary potential derivative; level n = " +
      std::to_string(mollify_n);
  return cm;
}

CatalogModel make_poly_drift(const Vec& drift_coeffs, double sigma_const) {
  if (!(sigma_const > 0)) throw ArgumentError("sigma must be positive");
  CatalogModel cm;
  cm.coeffs.name = "poly_drift";
  cm.coeffs.dim = 1;
  const Vec c = drift_coeffs;
  cm.coeffs.drift = [c](double, const Vec& x, Vec& out) {
    double acc = 0;
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * x[0] + c[k];
    out[0] = acc;
  };
  cm.coeffs.sigma = [sigma_const](double, const Vec&, Mat& out) {
    out(0, 0) = sigma_const;
  };
  cm.coeffs.constant_sigma = true;
  const double a_val = sigma_const * sigma_const;
  cm.coeffs.lambda_fn = [a_val](const Vec&) { return a_val; };
  cm.coeffs.Lambda_fn = [a_val](const Vec&) { return a_val; };
  cm.coeffs.holder_a_fn = [](const Vec&) { return 0.0; };
  cm.coeffs.ll2_constant = 1.0;
  const int deg = static_cast<int>(c.size()) - 1;
  cm.coeffs.drift_growth = deg >= 2   ? DriftGrowth::superlinear
                           : deg == 1 ? DriftGrowth::linear
                                      : DriftGrowth::bounded;
  // tight numeric sup over the unit interval around x
  auto poly_eval = [c](double u) {
    double acc = 0;
    for (Eigen::Index k = c.size() - 1; k >= 0; --k) acc = acc * u + c[k];
    return acc;
  };
  cm.coeffs.lp_b_fn = [poly_eval](const Vec& x) {
    double sup = 0;
    for (int i = 0; i <= 128; ++i)
      sup = std::max(sup, std::abs(poly_eval(x[0] - 1.0 + 2.0 * i / 128.0)));
    return sup;
  };
  cm.coeffs.holder_b_fn = [c, poly_eval](const Vec& x) {
    double sup = 0, lip = 0;
    for (int i = 0; i <= 128; ++i) {
      const double u = x[0] - 1.0 + 2.0 * i / 128.0;
      sup = std::max(sup, std::abs(poly_eval(u)));
      double d = 0;
      for (Eigen::Index k = c.size() - 1; k >= 1; --k) d = d * u + k * c[k];
      lip = std::max(lip, std::abs(d));
    }
    return sup + lip;
  };
  cm.weights = unit_weights();
  cm.lyapunov = quadratic_lyapunov(1);
  cm.description = "inline polynomial drift, constant sigma";
  return cm;
}

std::vector<std::string> catalog_names() {
  return {"heat", "ou", "cubic", "geometric_drift", "singular_v"};
}

CatalogModel catalog_get(const std::string& name) {
  if (name == "heat") return make_heat();
  if (name == "ou") return make_ou();
  if (name == "cubic") return make_cubic();
  if (name == "geometric_drift") return make_geometric_drift();
  if (name == "singular_v") return make_singular_v();
  throw ArgumentError("unknown catalog model: " + name);
}

}  // namespace semibound
