#include "semibound/pdeoracle.hpp"

#include "semibound/catalog.hpp"

#include "doctest.h"

#include <cmath>

using namespace semibound;

TEST_CASE("gaussian oracle: symmetry, moments, derivative law") {
  const Observable sign = make_observable("sign");
  CHECK(gaussian_semigroup_exact(sign, 0.3, 0.0, 1.0) ==
        doctest::Approx(0.0).epsilon(1e-8));

  // derivative of the smoothed step by a tiny central difference
  for (double t : {0.1, 0.5}) {
    const double d = 1e-6;
    const double cd = (gaussian_semigroup_exact(sign, t, d, 1.0) -
                       gaussian_semigroup_exact(sign, t, -d, 1.0)) /
                      (2 * d);
    CHECK(cd == doctest::Approx(1.0 / std::sqrt(M_PI * t)).epsilon(1e-5));
  }

  const Observable x2 = make_observable("x2");
  for (double t : {0.05, 0.4, 2.0})
    CHECK(gaussian_semigroup_exact(x2, t, 0.0, 1.0) ==
          doctest::Approx(2.0 * t).epsilon(1e-8));
}

TEST_CASE("gaussian oracle: weighted-derivative forms match closed values") {
  const Observable sign = make_observable("sign");
  CHECK(gaussian_semigroup_derivative(sign, 1, 0.1, 0.0, 1.0) ==
        doctest::Approx(1.0 / std::sqrt(0.1 * M_PI)).epsilon(1e-6));

  // indicator of the half line at x = 1: value N((x)/sqrt(2t)), so the
  // second derivative is -(u) pdf(u) / (2t) with u = x / sqrt(2t)
  const Observable ind = make_indicator(0.0);
  for (double t : {0.05, 0.1, 0.2}) {
    const double u = 1.0 / std::sqrt(2.0 * t);
    const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
    const double expected = -u * pdf / (2.0 * t);
    CHECK(gaussian_semigroup_derivative(ind, 2, t, 1.0, 1.0) ==
          doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("ou closed form: trigonometric and linear families") {
  const Observable sin_o = make_observable("sin");
  const double t = 1.0;
  const double s2 = 1.0 - std::exp(-2.0 * t);
  const auto r = ou_closed_form(sin_o, 1.0, t, 0.0);
  CHECK(r.value == doctest::Approx(0.0));
  CHECK(r.gradient ==
        doctest::Approx(std::exp(-1.0) * std::exp(-0.5 * s2)).epsilon(1e-12));
  CHECK(r.hessian == doctest::Approx(0.0));

  const Observable id = make_observable("x");
  for (double kappa : {0.5, 1.0, 2.0})
    for (double tt : {0.1, 1.0, 4.0}) {
      const auto lin = ou_closed_form(id, kappa, tt, 1.7);
      CHECK(lin.gradient == doctest::Approx(std::exp(-kappa * tt)));
      CHECK(lin.value == doctest::Approx(1.7 * std::exp(-kappa * tt)));
      CHECK(lin.hessian == doctest::Approx(0.0));
    }

  // identity at t = 0
  const auto id0 = ou_closed_form(sin_o, 1.0, 0.0, 0.7);
  CHECK(id0.value == doctest::Approx(std::sin(0.7)));
}

TEST_CASE("ou closed form: quadrature families agree with differentiation") {
  const Observable th = make_observable("tanh");
  const double t = 0.7, x = 0.9, kappa = 1.0;
  const auto r = ou_closed_form(th, kappa, t, x);
  const double d = 1e-5;
  const double cd = (ou_closed_form(th, kappa, t, x + d).value -
                     ou_closed_form(th, kappa, t, x - d).value) /
                    (2 * d);
  CHECK(r.gradient == doctest::Approx(cd).epsilon(1e-7));
  const double cd2 = (ou_closed_form(th, kappa, t, x + d).value -
                      2 * r.value +
                      ou_closed_form(th, kappa, t, x - d).value) /
                     (d * d);
  CHECK(r.hessian == doctest::Approx(cd2).epsilon(1e-4));

  // polynomial moments: phi = y^4 has E (m + s Z)^4 in closed form
  Vec c = Vec::Zero(5);
  c[4] = 1.0;
  const auto q = ou_closed_form(make_poly(c), 1.0, 0.5, 1.2);
  const double m = 1.2 * std::exp(-0.5);
  const double s2 = 1.0 - std::exp(-1.0);
  CHECK(q.value ==
        doctest::Approx(m * m * m * m + 6 * m * m * s2 + 3 * s2 * s2));
}

TEST_CASE("ou closed form: sign and indicator derivatives") {
  const Observable sign_o = make_observable("sign");
  const double t = 0.5, x = 0.4;
  const auto r = ou_closed_form(sign_o, 1.0, t, x);
  const double d = 1e-6;
  const double cd = (ou_closed_form(sign_o, 1.0, t, x + d).value -
                     ou_closed_form(sign_o, 1.0, t, x - d).value) /
                    (2 * d);
  CHECK(r.gradient == doctest::Approx(cd).epsilon(1e-6));
  CHECK_THROWS_AS(ou_closed_form(sign_o, 0.0, 1.0, 0.0), ArgumentError);
}

TEST_CASE("kolmogorov grid solve: heat separation of variables") {
  const CatalogModel heat = make_heat();
  const Observable sin_o = make_observable("sin");
  const GridSolution sol =
      solve_kolmogorov_fd(heat.coeffs, sin_o, 0.5, -10.0, 10.0, 1025, 5000);
  CHECK(sol.maximum_principle_ok);
  CHECK(sol.contamination_width == doctest::Approx(4.0));
  double max_err = 0;
  for (double x = sol.interior_lo(); x <= sol.interior_hi(); x += 0.37)
    max_err = std::max(max_err, std::abs(sol.eval(0.5, x) -
                                         std::exp(-0.5) * std::sin(x)));
  CHECK(max_err < 1e-4);
}

TEST_CASE("kolmogorov grid solve: drift model matches the closed form") {
  const CatalogModel ou = make_ou();
  const Observable sin_o = make_observable("sin");
  const GridSolution sol =
      solve_kolmogorov_fd(ou.coeffs, sin_o, 1.0, -10.0, 10.0, 1025, 2000);
  CHECK(sol.maximum_principle_ok);
  double max_err = 0;
  for (double x = -4.0; x <= 4.0; x += 0.5)
    max_err = std::max(
        max_err,
        std::abs(sol.eval(1.0, x) - ou_closed_form(sin_o, 1.0, 1.0, x).value));
  CHECK(max_err < 1e-3);
}

TEST_CASE("kolmogorov grid solve: constants are exact") {
  const CatalogModel ou = make_ou();
  Observable c;
  c.kind = ObsKind::poly;
  c.poly_coeffs = Vec::Constant(1, 0.75);
  const GridSolution sol =
      solve_kolmogorov_fd(ou.coeffs, c, 0.5, -8.0, 8.0, 257, 200);
  for (double x = -3.0; x <= 3.0; x += 0.7)
    CHECK(sol.eval(0.4, x) == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("kolmogorov grid solve: second-order interior convergence") {
  const CatalogModel heat = make_heat();
  const Observable sin_o = make_observable("sin");
  auto interior_error = [&](int nodes) {
    const GridSolution sol =
        solve_kolmogorov_fd(heat.coeffs, sin_o, 0.25, -9.0, 9.0, nodes, 6000);
    double err = 0;
    for (double x = -3.0; x <= 3.0; x += 0.21)
      err = std::max(err, std::abs(sol.eval(0.25, x) -
                                   std::exp(-0.25) * std::sin(x)));
    return err;
  };
  const double coarse = interior_error(129);
  const double fine = interior_error(257);
  CHECK(coarse / fine > 2.5);
  CHECK(coarse / fine < 7.0);
}

TEST_CASE("kolmogorov grid solve: domain validation") {
  const CatalogModel heat = make_heat();
  const Observable sin_o = make_observable("sin");
  // contamination zones would cover the whole box
  CHECK_THROWS_AS(
      solve_kolmogorov_fd(heat.coeffs, sin_o, 1.0, -2.0, 2.0, 65, 50),
      DomainError);
  const GridSolution sol =
      solve_kolmogorov_fd(heat.coeffs, sin_o, 0.25, -8.0, 8.0, 257, 400);
  CHECK_THROWS_AS(sol.eval(0.2, 7.5), DomainError);
  CHECK_NOTHROW(sol.eval(0.2, 7.5, true));
}
