#include "semibound/bounds.hpp"

#include "semibound/catalog.hpp"
#include "semibound/rng.hpp"

#include "doctest.h"

#include <cmath>

using namespace semibound;

namespace {

Vec pt(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

// unit-coefficient inputs: a = I, b = 0
BoundInputs heat_inputs(double t) {
  BoundInputs in;
  in.t = t;
  in.x = pt(0);
  in.norms.center = in.x;
  in.weights = unit_weights();
  return in;
}

BoundInputs ou_inputs(double t, double x) {
  const CatalogModel ou = make_ou();
  BoundInputs in = make_bound_inputs(ou.coeffs, ou.weights, t, pt(x));
  return in;
}

}  // namespace

TEST_CASE("gamma_t closed forms") {
  CHECK(gamma_t(heat_inputs(1.0)) == doctest::Approx(2.0));
  CHECK(gamma_t(heat_inputs(0.01)) == doctest::Approx(2.0));

  BoundInputs in = heat_inputs(3.0);
  in.norms.holder_a = 1.0;
  CHECK(gamma_t(in) == doctest::Approx(4.0));  // 1*(2*1 + 0) + 2

  // drift of unit local sup: sqrt(1)*(0 + 1) + 2
  CHECK(gamma_t(ou_inputs(1.0, 0.0)) == doctest::Approx(3.0));
}

TEST_CASE("gamma_tilde_t closed forms") {
  CHECK(gamma_tilde_t(heat_inputs(0.5)) ==
        doctest::Approx(std::sqrt(0.5) * 0 + 2.0));
  CHECK(gamma_tilde_t(ou_inputs(1.0, 0.0)) == doctest::Approx(4.0));

  // enumeration over B_1(5): sup |−y| = 6, Lipschitz constant 1
  double sup = 0;
  for (int i = 0; i <= 4096; ++i) {
    const double y = 4.0 + 2.0 * i / 4096.0;
    sup = std::max(sup, std::abs(-y));
  }
  CHECK(sup == doctest::Approx(6.0));
  const BoundInputs in5 = ou_inputs(1.0, 5.0);
  CHECK(in5.norms.holder_b == doctest::Approx(7.0));
  CHECK(gamma_tilde_t(in5) == doctest::Approx(9.0));
}

TEST_CASE("window scales and radius selection") {
  BoundInputs in = heat_inputs(1.0);
  in.horizon_S = 0;
  in.horizon_T = 2;
  CHECK(cal_g(in) == doctest::Approx(2.0));
  CHECK(cal_h(in) == doctest::Approx(2.0));
  const auto [R0, R] = radius_select(in, DerivCase::gradient);
  CHECK(R0 == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(R == doctest::Approx(R0));  // Lambda1/(lambda calG) = 1
  CHECK(R <= R0);

  // infinitely wide window: the bracket drops out entirely
  BoundInputs wide = heat_inputs(1.0);
  wide.horizon_S = -1e8;
  wide.horizon_T = 1.0 + 1e8;
  wide.norms.holder_a = 0;
  CHECK(cal_g(wide) == doctest::Approx(2.0));
  CHECK(cal_h(wide) == doctest::Approx(2.0));

  BoundInputs mixed = heat_inputs(1.0);
  mixed.horizon_S = 0;
  mixed.horizon_T = 2;
  mixed.norms.holder_a = 1.0;
  mixed.norms.lp_b = 1.0;
  CHECK(cal_g(mixed) == doctest::Approx(5.0));  // 1*(2 + 1) + 2

  BoundInputs bad = heat_inputs(0.4);
  bad.horizon_S = 0;
  bad.horizon_T = 2;
  CHECK_THROWS_AS(radius_select(bad, DerivCase::gradient), DomainError);
}

TEST_CASE("radius stays below the base radius on random inputs") {
  for (int i = 0; i < 200; ++i) {
    BoundInputs in = heat_inputs(1.0);
    in.lambda = 0.2 + rng_uniform(3, 0, i, 0, 0);
    in.Lambda = in.lambda + 2.0 * rng_uniform(3, 0, i, 1, 0);
    in.norms.holder_a = 3.0 * rng_uniform(3, 0, i, 2, 0);
    in.norms.lp_b = 3.0 * rng_uniform(3, 0, i, 3, 0);
    in.horizon_S = 0;
    in.horizon_T = 1.0 + 3.0 * rng_uniform(3, 0, i, 4, 0);
    in.t = 0.5 * (in.horizon_T + in.horizon_S) +
           0.49 * (in.horizon_T - in.horizon_S) * rng_uniform(3, 0, i, 5, 0);
    for (auto c : {DerivCase::gradient, DerivCase::hessian}) {
      const auto [R0, R] = radius_select(in, c);
      CHECK(R <= R0 * (1 + 1e-12));
      CHECK(R0 <= std::sqrt(in.horizon_T - in.t) * (1 + 1e-12));
      CHECK(R > 0);
    }
  }
}

TEST_CASE("gradient right-hand side closed forms") {
  CHECK(grad_rhs(heat_inputs(1.0)) ==
        doctest::Approx(std::pow(2.0, 1.4)).epsilon(1e-12));
  CHECK(grad_rhs(heat_inputs(0.01)) ==
        doctest::Approx(std::pow(2.0, 1.4) / 0.1).epsilon(1e-12));

  // drift model with quadratic weights at the origin
  const BoundInputs in = ou_inputs(1.0, 0.0);
  // enumeration: sup of 1 + y^2 over B_1(0) is 2
  double sup_rho1 = 0;
  for (int i = 0; i <= 4096; ++i) {
    const double y = -1.0 + 2.0 * i / 4096.0;
    sup_rho1 = std::max(sup_rho1, 1.0 + y * y);
  }
  CHECK(sup_rho1 == doctest::Approx(2.0));
  const double ell0_2 = in.weights.eval_ell0(2.0);
  const double expected =
      std::pow(2.0, 0.1) * 3.0 * std::pow(2.0, 0.3) * ell0_2 * 2.0;
  CHECK(grad_rhs(in) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("hessian right-hand side closed forms") {
  BoundInputs h1 = heat_inputs(1.0);
  h1.ll2_constant = 1.0;
  CHECK(hess_rhs(h1, 0.0) == doctest::Approx(4.0));
  BoundInputs h2 = heat_inputs(0.25);
  h2.ll2_constant = 1.0;
  CHECK(hess_rhs(h2, 0.0) == doctest::Approx(16.0));

  const BoundInputs in = ou_inputs(1.0, 0.0);
  const double expected =
      std::pow(4.0, 3.0) * in.weights.eval_ell0(2.0) * 2.0;
  CHECK(hess_rhs(in, 1.0) == doctest::Approx(expected).epsilon(1e-12));

  BoundInputs no_cert = heat_inputs(1.0);
  no_cert.ll2_constant = 0.0;
  CHECK_THROWS_AS(hess_rhs(no_cert, 0.0), AssumptionError);
  CHECK_THROWS_AS(hess_rhs(h1, 0.5), ArgumentError);
}

TEST_CASE("long-time right-hand sides") {
  BoundInputs in = ou_inputs(3.0, 0.0);
  in.weights.ell1 = DecayLaw{DecayLaw::Family::exponential, 1.0, 1.0};
  const double short_at_1 = grad_rhs(ou_inputs(1.0, 0.0));
  CHECK(longtime_grad_rhs(in) ==
        doctest::Approx(std::exp(-2.0) * short_at_1).epsilon(1e-12));

  // degenerate flat law reduces to the unit-time value
  in.weights.ell1 = DecayLaw{DecayLaw::Family::exponential, 0.0, 1.0};
  in.t = 5.0;
  CHECK(longtime_grad_rhs(in) == doctest::Approx(short_at_1).epsilon(1e-12));

  in.weights.ell1 = DecayLaw{DecayLaw::Family::polynomial, 2.0, 1.0};
  in.t = 11.0;
  CHECK(longtime_grad_rhs(in) ==
        doctest::Approx(short_at_1 / 121.0).epsilon(1e-12));

  in.t = 1.5;
  CHECK_THROWS_AS(longtime_grad_rhs(in), DomainError);
  BoundInputs no_law = ou_inputs(3.0, 0.0);
  CHECK_THROWS_AS(longtime_grad_rhs(no_law), ConfigError);
}

TEST_CASE("poisson and schauder right-hand sides") {
  BoundInputs in = ou_inputs(1.0, 0.0);
  in.weights.ell1 = DecayLaw{DecayLaw::Family::exponential, 1.0, 1.0};
  const double expected = 3.0 * std::pow(2.0, 0.1) * std::pow(2.0, 0.3) * 2.0;
  CHECK(poisson_grad_rhs(in) == doctest::Approx(expected).epsilon(1e-12));

  // unit-coefficient formula values with an integrable law attached
  BoundInputs heat = heat_inputs(1.0);
  heat.weights.ell1 = DecayLaw{DecayLaw::Family::exponential, 1.0, 1.0};
  CHECK(poisson_grad_rhs(heat) == doctest::Approx(std::pow(2.0, 1.4)));
  heat.alpha = 0.5;
  heat.ll2_constant = 1.0;
  CHECK(schauder_rhs(heat) == doctest::Approx(std::pow(2.0, 2.5) + 1.0));

  BoundInputs gate = heat_inputs(1.0);
  CHECK_THROWS_AS(poisson_grad_rhs(gate), AssumptionError);
  gate.weights.ell1 = DecayLaw{DecayLaw::Family::polynomial, 0.5, 1.0};
  CHECK_THROWS_AS(poisson_grad_rhs(gate), AssumptionError);
}

TEST_CASE("right-hand sides are monotone in the coefficient data") {
  for (int i = 0; i < 100; ++i) {
    BoundInputs base = heat_inputs(0.5);
    base.lambda = 0.3 + rng_uniform(11, 0, i, 0, 0);
    base.Lambda = base.lambda + rng_uniform(11, 0, i, 1, 0);
    base.norms.holder_a = rng_uniform(11, 0, i, 2, 0);
    base.norms.lp_b = rng_uniform(11, 0, i, 3, 0);
    base.norms.holder_b = base.norms.lp_b + rng_uniform(11, 0, i, 4, 0);
    base.ll2_constant = 1.0;
    const double g0 = grad_rhs(base), h0 = hess_rhs(base, 0.0);

    BoundInputs up = base;
    up.norms.holder_a += 0.5;
    CHECK(grad_rhs(up) >= g0);
    CHECK(hess_rhs(up, 0.0) >= h0);
    up = base;
    up.norms.lp_b += 0.5;
    up.norms.holder_b += 0.5;
    CHECK(grad_rhs(up) >= g0);
    CHECK(hess_rhs(up, 0.0) >= h0);
    up = base;
    up.Lambda += 0.5;
    CHECK(grad_rhs(up) >= g0);
    CHECK(hess_rhs(up, 0.0) >= h0);
    BoundInputs down = base;
    down.lambda = std::min(down.lambda + 0.4, down.Lambda);
    CHECK(grad_rhs(down) <= g0 + 1e-12);
    CHECK(hess_rhs(down, 0.0) <= h0 + 1e-12);
  }
}

TEST_CASE("short-time product stays bounded as t -> 0") {
  const BoundInputs in0 = ou_inputs(1.0, 1.0);
  double first = 0;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
    BoundInputs in = in0;
    in.t = t;
    const double prod = grad_rhs(in) * std::sqrt(std::min(t, 1.0));
    if (first == 0) first = prod;
    CHECK(prod <= first * 1.01);
    CHECK(prod > 0);
  }
}

TEST_CASE("exponent regime and ellipticity validation") {
  BoundInputs in = heat_inputs(1.0);
  in.p_b = 0.8;  // below the dimension
  CHECK_THROWS_AS(gamma_t(in), DomainError);
  BoundInputs neg = heat_inputs(1.0);
  neg.lambda = 0.0;
  CHECK_THROWS_AS(gamma_t(neg), ArgumentError);
  BoundInputs swapped = heat_inputs(1.0);
  swapped.lambda = 2.0;
  swapped.Lambda = 1.0;
  CHECK_THROWS_AS(gamma_t(swapped), ArgumentError);
}

TEST_CASE("assembled report carries the constant convention") {
  const CatalogModel ou = make_ou();
  BoundInputs in = make_bound_inputs(ou.coeffs, ou.weights, 1.0, pt(0.5));
  in.weights.ell1 = DecayLaw{DecayLaw::Family::exponential, 1.0, 1.0};
  in.t = 3.0;
  const BoundReport rep = assemble_bound_report(in);
  CHECK(rep.constant_convention == std::string("C=1, compare by ratio"));
  CHECK(rep.R <= rep.R0);
  CHECK(rep.Gamma_t > 0);
  CHECK(rep.longtime_grad_rhs.has_value());
  CHECK(rep.poisson_grad_rhs.has_value());
  CHECK(rep.schauder_rhs.has_value());
}

TEST_CASE("advanced exponent overrides reduce to the default calibration") {
  BoundInputs in = ou_inputs(0.5, 1.0);
  const double dflt = grad_rhs(in);
  // q = 1/eps and d/p = d/p_b + eps reproduce the default exponents
  in.q_override = 1.0 / in.epsilon;
  in.p_override = 1.0 / in.epsilon;  // d = 1, p_b = inf
  CHECK(grad_rhs(in) == doctest::Approx(dflt).epsilon(1e-12));
  in.q_override = 5.0;
  in.p_override = 3.0;
  CHECK(grad_rhs(in) > 0);
}
