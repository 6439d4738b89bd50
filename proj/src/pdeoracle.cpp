#include "semibound/pdeoracle.hpp"

#include <algorithm>
#include <cmath>

namespace semibound {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double normal_pdf(double u) { return kInvSqrt2Pi * std::exp(-0.5 * u * u); }
double normal_cdf(double u) { return 0.5 * std::erfc(-u * M_SQRT1_2); }

struct Simpson {
  const std::function<double(double)>& f;
  double tol;
  int max_depth = 48;

  double panel(double a, double fa, double b, double fb, double m, double fm,
               double whole, double tol_here, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
      throw OracleError("quadrature integrand not finite");
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double err = left + right - whole;
    if (depth >= max_depth || std::abs(err) <= 15.0 * tol_here)
      return left + right + err / 15.0;
    return panel(a, fa, m, fm, lm, flm, left, 0.5 * tol_here, depth + 1) +
           panel(m, fm, b, fb, rm, frm, right, 0.5 * tol_here, depth + 1);
  }

  double integrate(double a, double b) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return panel(a, fa, b, fb, m, fm, whole, tol, 0);
  }
};

// adaptive integral of g over [-L, L] split into panels of width <= 1
double adaptive_integral(const std::function<double(double)>& g, double L,
                         double abs_tol) {
  const int panels = std::max(8, static_cast<int>(std::ceil(2 * L)));
  Simpson s{g, abs_tol / panels};
  double acc = 0;
  for (int i = 0; i < panels; ++i) {
    const double a = -L + 2 * L * i / panels;
    const double b = -L + 2 * L * (i + 1) / panels;
    acc += s.integrate(a, b);
  }
  return acc;
}

}  // namespace

double gauss_expect(const std::function<double(double)>& g, double mean,
                    double sd, double rel_tol) {
  if (!(sd >= 0)) throw ArgumentError("standard deviation must be nonnegative");
  if (sd == 0) return g(mean);
  auto integrand = [&](double u) { return g(mean + sd * u) * normal_pdf(u); };
  // scale for the absolute tolerance from a coarse |integrand| pass
  double scale = 0;
  for (int i = 0; i <= 64; ++i) {
    const double u = -10.0 + 20.0 * i / 64.0;
    scale += std::abs(integrand(u));
  }
  scale = std::max(scale * 20.0 / 65.0, 1e-300);
  return adaptive_integral(integrand, 10.0, rel_tol * scale);
}

double gaussian_semigroup_exact(const Observable& phi, double t, double x,
                                double a_const, double rel_tol) {
  if (!(a_const > 0)) throw ArgumentError("diffusion constant must be positive");
  if (!(t >= 0)) throw ArgumentError("time must be nonnegative");
  const double sd = std::sqrt(2.0 * t * a_const);
  return gauss_expect([&](double y) { return phi.eval(y); }, x, sd, rel_tol);
}

double gaussian_semigroup_derivative(const Observable& phi, int order, double t,
                                     double x, double a_const, double rel_tol) {
  if (order != 1 && order != 2)
    throw ArgumentError("derivative order must be 1 or 2");
  if (!(t > 0)) throw ArgumentError("derivative oracle needs t > 0");
  const double sd = std::sqrt(2.0 * t * a_const);
  if (order == 1) {
    const double v = gauss_expect(
        [&](double u) { return phi.eval(x + sd * u) * u; }, 0.0, 1.0, rel_tol);
    return v / sd;
  }
  const double v = gauss_expect(
      [&](double u) { return phi.eval(x + sd * u) * (u * u - 1.0); }, 0.0, 1.0,
      rel_tol);
  return v / (sd * sd);
}

namespace {

// central moments E (m + s Z)^k up to k = 4
double gaussian_moment(int k, double m, double s) {
  switch (k) {
    case 0:
      return 1;
    case 1:
      return m;
    case 2:
      return m * m + s * s;
    case 3:
      return m * m * m + 3 * m * s * s;
    case 4:
      return m * m * m * m + 6 * m * m * s * s + 3 * s * s * s * s;
  }
  throw ArgumentError("polynomial degree exceeds 4");
}

}  // namespace

OuClosedForm ou_closed_form(const Observable& phi, double kappa, double t,
                            double x) {
  if (!(kappa > 0)) throw ArgumentError("kappa must be positive");
  if (t < 0) throw ArgumentError("time must be nonnegative");
  const double decay = std::exp(-kappa * t);
  const double s2 = (1.0 - std::exp(-2.0 * kappa * t)) / kappa;
  const double s = std::sqrt(std::max(s2, 0.0));
  const double m = decay * x;
  OuClosedForm out;

  switch (phi.kind) {
    case ObsKind::poly: {
      double v = 0, g = 0, h = 0;
      for (Eigen::Index k = 0; k < phi.poly_coeffs.size(); ++k) {
        const double c = phi.poly_coeffs[k];
        if (c == 0) continue;
        v += c * gaussian_moment(static_cast<int>(k), m, s);
        if (k >= 1)
          g += c * k * gaussian_moment(static_cast<int>(k) - 1, m, s);
        if (k >= 2)
          h += c * k * (k - 1) * gaussian_moment(static_cast<int>(k) - 2, m, s);
      }
      out.value = v;
      out.gradient = decay * g;
      out.hessian = decay * decay * h;
      return out;
    }
    case ObsKind::sin: {
      const double damp = std::exp(-0.5 * s2);
      out.value = damp * std::sin(m);
      out.gradient = decay * damp * std::cos(m);
      out.hessian = -decay * decay * damp * std::sin(m);
      return out;
    }
    case ObsKind::cos: {
      const double damp = std::exp(-0.5 * s2);
      out.value = damp * std::cos(m);
      out.gradient = -decay * damp * std::sin(m);
      out.hessian = -decay * decay * damp * std::cos(m);
      return out;
    }
    case ObsKind::sign: {
      if (s == 0) {
        out.value = x > 0 ? 1 : (x < 0 ? -1 : 0);
        out.gradient = kNaN;
        out.hessian = kNaN;
        return out;
      }
      const double u = m / s;
      out.value = 2.0 * normal_cdf(u) - 1.0;
      out.gradient = decay * 2.0 * normal_pdf(u) / s;
      out.hessian = -decay * decay * 2.0 * u * normal_pdf(u) / (s * s);
      return out;
    }
    case ObsKind::indicator: {
      if (s == 0) {
        out.value = x >= phi.threshold ? 1 : 0;
        out.gradient = kNaN;
        out.hessian = kNaN;
        return out;
      }
      const double u = (m - phi.threshold) / s;
      out.value = normal_cdf(u);
      out.gradient = decay * normal_pdf(u) / s;
      out.hessian = -decay * decay * u * normal_pdf(u) / (s * s);
      return out;
    }
    case ObsKind::tanh:
    case ObsKind::custom: {
      if (!phi.smooth())
        throw ArgumentError("observable family not supported by the closed form");
      out.value = gauss_expect([&](double y) { return phi.eval(y); }, m, s);
      out.gradient =
          decay * gauss_expect([&](double y) { return phi.deriv1(y); }, m, s);
      out.hessian = decay * decay *
                    gauss_expect([&](double y) { return phi.deriv2(y); }, m, s);
      return out;
    }
  }
  throw ArgumentError("observable family not supported by the closed form");
}

double GridSolution::eval(double tau, double x, bool allow_contaminated) const {
  if (!allow_contaminated && (x < interior_lo() || x > interior_hi()))
    throw DomainError("evaluation point inside the boundary contamination zone");
  if (x < box_lo || x > box_hi || tau < taus.front() - 1e-12 ||
      tau > taus.back() + 1e-12)
    throw DomainError("evaluation point outside the solved grid");
  const double hx = xs[1] - xs[0];
  const double ht = taus.size() > 1 ? taus[1] - taus[0] : 1.0;
  const auto nx = xs.size();
  long j = std::clamp<long>(static_cast<long>((x - box_lo) / hx), 0, nx - 2);
  long k = std::clamp<long>(static_cast<long>(tau / ht), 0,
                            static_cast<long>(taus.size()) - 2);
  if (taus.size() == 1) k = 0;
  const double wx = (x - xs[j]) / hx;
  const double wt =
      taus.size() > 1 ? (tau - taus[k]) / (taus[k + 1] - taus[k]) : 0.0;
  const double a0 = (1 - wx) * u(k, j) + wx * u(k, j + 1);
  if (taus.size() == 1) return a0;
  const double a1 = (1 - wx) * u(k + 1, j) + wx * u(k + 1, j + 1);
  return (1 - wt) * a0 + wt * a1;
}

GridSolution solve_kolmogorov_fd(const CoefficientModel& model,
                                 const Observable& phi, double T, double box_lo,
                                 double box_hi, int nodes, int steps) {
  if (model.dim != 1)
    throw ArgumentError("grid solver is one-dimensional");
  if (nodes < 8 || steps < 1) throw ArgumentError("grid too small");
  if (!(box_hi > box_lo)) throw ArgumentError("empty box");

  GridSolution sol;
  sol.box_lo = box_lo;
  sol.box_hi = box_hi;
  sol.xs = Vec::LinSpaced(nodes, box_lo, box_hi);
  const double hx = sol.xs[1] - sol.xs[0];
  const double ht = T / steps;

  Vec a(nodes), b(nodes);
  {
    Vec xv(1), bv(1);
    Mat av(1, 1);
    double Lambda_max = 0;
    for (int j = 0; j < nodes; ++j) {
      xv[0] = sol.xs[j];
      model.eval_a(0.0, xv, av);
      model.eval_drift(0.0, xv, bv);
      if (!(av(0, 0) > 0) || !std::isfinite(bv[0]))
        throw EvaluationError("coefficients unusable at x=" +
                              std::to_string(sol.xs[j]));
      a[j] = av(0, 0);
      b[j] = bv[0];
      Lambda_max = std::max(Lambda_max, av(0, 0));
    }
    sol.contamination_width = 4.0 * std::sqrt(2.0 * Lambda_max * T);
  }
  if (sol.contamination_width * 2 >= (box_hi - box_lo))
    throw DomainError("box too small: contamination zones overlap");

  Vec v(nodes);
  for (int j = 0; j < nodes; ++j) v[j] = phi.eval(sol.xs[j]);
  sol.phi_min = v.minCoeff();
  sol.phi_max = v.maxCoeff();

  // implicit step: (I - ht L) v_new = v, L v = a v'' + b v', tridiagonal
  Vec low(nodes), diag(nodes), up(nodes);
  for (int j = 1; j + 1 < nodes; ++j) {
    const double ca = ht * a[j] / (hx * hx);
    const double cb = ht * b[j] / (2 * hx);
    low[j] = -(ca - cb);
    diag[j] = 1 + 2 * ca;
    up[j] = -(ca + cb);
  }
  // edges: second derivative extrapolated to zero, one-sided advection
  // (forward difference at the left edge, backward at the right)
  {
    const double cb0 = ht * b[0] / hx;
    diag[0] = 1 + cb0;
    up[0] = -cb0;
    low[0] = 0;
    const double cbn = ht * b[nodes - 1] / hx;
    diag[nodes - 1] = 1 - cbn;
    low[nodes - 1] = cbn;
    up[nodes - 1] = 0;
  }

  sol.u.resize(steps + 1, nodes);
  sol.u.row(0) = v.transpose();
  sol.taus.resize(steps + 1);
  sol.taus[0] = 0;

  Vec cp(nodes), dp(nodes), w(nodes);
  for (int k = 1; k <= steps; ++k) {
    // Thomas solve
    cp[0] = up[0] / diag[0];
    dp[0] = v[0] / diag[0];
    for (int j = 1; j < nodes; ++j) {
      const double mlt = diag[j] - low[j] * cp[j - 1];
      cp[j] = up[j] / mlt;
      dp[j] = (v[j] - low[j] * dp[j - 1]) / mlt;
    }
    w[nodes - 1] = dp[nodes - 1];
    for (int j = nodes - 2; j >= 0; --j) w[j] = dp[j] - cp[j] * w[j + 1];
    v = w;
    sol.u.row(k) = v.transpose();
    sol.taus[k] = k * ht;
  }

  // maximum principle on the uncontaminated interior
  sol.maximum_principle_ok = true;
  const double slack = 1e-9 * (1 + std::abs(sol.phi_max) + std::abs(sol.phi_min));
  for (int k = 0; k <= steps && sol.maximum_principle_ok; ++k)
    for (int j = 0; j < nodes; ++j) {
      if (sol.xs[j] < sol.interior_lo() || sol.xs[j] > sol.interior_hi())
        continue;
      if (sol.u(k, j) > sol.phi_max + slack ||
          sol.u(k, j) < sol.phi_min - slack) {
        sol.maximum_principle_ok = false;
        break;
      }
    }
  return sol;
}

}  // namespace semibound
