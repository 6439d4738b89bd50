#include "semibound/coeffs.hpp"

#include "doctest.h"

#include <cmath>

using namespace semibound;

namespace {

Vec pt(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

VectorField scalar_field(const std::function<double(double)>& f) {
  return [f](const Vec& y) {
    Vec out(1);
    out[0] = f(y[0]);
    return out;
  };
}

}  // namespace

TEST_CASE("holder seminorm: constant field vanishes") {
  const auto f = scalar_field([](double) { return 3.5; });
  CHECK(local_holder_seminorm(f, pt(0), 0.7, 2000) == doctest::Approx(0.0));
}

TEST_CASE("holder seminorm: linear field has ratio one") {
  const auto f = scalar_field([](double y) { return y; });
  CHECK(local_holder_seminorm(f, pt(2.0), 1.0, 500) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("holder seminorm: sine matches the dense pair-search value") {
  // reference: exhaustive pair search on a fine grid of B_1(0)
  double dense = 0;
  const int n = 1200;
  for (int i = 0; i < n; ++i) {
    const double a = -1.0 + 2.0 * i / (n - 1);
    for (int j = i + 1; j < n; ++j) {
      const double b = -1.0 + 2.0 * j / (n - 1);
      dense = std::max(dense, std::abs(std::sin(a) - std::sin(b)) /
                                  std::abs(a - b));
    }
  }
  CHECK(dense == doctest::Approx(1.0).epsilon(1e-4));

  const auto f = scalar_field([](double y) { return std::sin(y); });
  const double est = local_holder_seminorm(f, pt(0), 1.0, 10000);
  CHECK(est == doctest::Approx(1.0).epsilon(0.01));
  CHECK(est <= dense + 1e-9);  // sampled value is a lower estimate
}

TEST_CASE("holder seminorm: monotone in budget, shift invariant") {
  const auto f = scalar_field([](double y) { return std::sin(3 * y); });
  const double a = local_holder_seminorm(f, pt(0), 0.5, 1000, 9);
  const double b = local_holder_seminorm(f, pt(0), 0.5, 4000, 9);
  const double c = local_holder_seminorm(f, pt(0), 0.5, 10000, 9);
  CHECK(a <= b);
  CHECK(b <= c);

  const auto g = scalar_field([](double y) { return std::sin(3 * y) + 42.0; });
  CHECK(local_holder_seminorm(g, pt(0), 0.5, 4000, 9) == doctest::Approx(b));
}

TEST_CASE("holder seminorm: errors") {
  const auto bad = scalar_field([](double) { return kNaN; });
  CHECK_THROWS_AS(local_holder_seminorm(bad, pt(0), 0.5, 10),
                  EvaluationError);
  const auto f = scalar_field([](double y) { return y; });
  CHECK_THROWS_AS(local_holder_seminorm(f, pt(0), 1.5, 10), ArgumentError);
  CHECK_THROWS_AS(local_holder_seminorm(f, pt(0), 0.0, 10), ArgumentError);
}

TEST_CASE("lp norm: zero and constant fields") {
  const auto zero = scalar_field([](double) { return 0.0; });
  CHECK(local_lp_norm(zero, pt(0.3), 2.0, 4000) == doctest::Approx(0.0));
  const auto c = scalar_field([](double) { return -2.5; });
  CHECK(local_lp_norm(c, pt(0), kInf, 200) == doctest::Approx(2.5));
}

TEST_CASE("lp norm: linear field against the exact integral") {
  // int_{-1}^{1} y^2 dy = 2/3
  const auto f = scalar_field([](double y) { return y; });
  const double expected = std::sqrt(2.0 / 3.0);
  CHECK(local_lp_norm(f, pt(0), 2.0, 10000) ==
        doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("lp norm: volume-normalized means are monotone in p") {
  const auto f = scalar_field([](double y) { return y * y + 0.2; });
  const double vol = 2.0;  // one-dimensional unit ball
  double prev = 0;
  for (double p : {1.5, 2.0, 4.0, 8.0}) {
    const double normalized =
        local_lp_norm(f, pt(0), p, 20000) / std::pow(vol, 1.0 / p);
    CHECK(normalized >= prev - 1e-6);
    prev = normalized;
  }
}

TEST_CASE("weighted sup norm") {
  ScalarField rho = [](const Vec& x) { return 1.0 + std::abs(x[0]); };
  std::vector<Vec> grid;
  for (int i = -10; i <= 10; ++i) grid.push_back(pt(i));

  ScalarField phi_rho = rho;
  CHECK(weighted_sup_norm(phi_rho, rho, grid) == doctest::Approx(1.0));
  ScalarField zero = [](const Vec&) { return 0.0; };
  CHECK(weighted_sup_norm(zero, rho, grid) == doctest::Approx(0.0));

  // direct enumeration of max |x| / (1 + |x|) over the integer grid
  double expected = 0;
  for (int i = -10; i <= 10; ++i)
    expected = std::max(expected, std::abs(double(i)) / (1.0 + std::abs(i)));
  CHECK(expected == doctest::Approx(10.0 / 11.0));
  ScalarField id = [](const Vec& x) { return x[0]; };
  CHECK(weighted_sup_norm(id, rho, grid) == doctest::Approx(10.0 / 11.0));

  CHECK_THROWS_AS(weighted_sup_norm(id, rho, {}), ArgumentError);
}

namespace {

SpaceTimeBox box1d(double t0, double t1, double lo, double hi) {
  SpaceTimeBox b;
  b.t0 = t0;
  b.t1 = t1;
  b.lo = pt(lo);
  b.hi = pt(hi);
  return b;
}

}  // namespace

TEST_CASE("anisotropic norm: constants and zero") {
  auto one = [](double, const Vec&) { return 1.0; };
  const auto cyl = box1d(0, 2, -1, 3);
  CHECK(anisotropic_norm(one, 2, 3, cyl, 64) ==
        doctest::Approx(std::pow(2.0, 0.5) * std::pow(4.0, 1.0 / 3.0))
            .epsilon(1e-12));
  CHECK(anisotropic_norm(one, kInf, kInf, cyl, 64) == doctest::Approx(1.0));
  auto zero = [](double, const Vec&) { return 0.0; };
  CHECK(anisotropic_norm(zero, 2, 2, cyl, 64) == doctest::Approx(0.0));
}

TEST_CASE("anisotropic norm: parabolic rescaling identities") {
  // smooth profile; compare the rescaled norm against the analytic factor
  auto u = [](double t, const Vec& x) {
    return (2.0 + std::sin(2 * t)) * std::exp(-0.5 * (x[0] - 0.3) * (x[0] - 0.3));
  };
  auto ux = [](double t, const Vec& x) {
    return -(x[0] - 0.3) * (2.0 + std::sin(2 * t)) *
           std::exp(-0.5 * (x[0] - 0.3) * (x[0] - 0.3));
  };
  const double l1 = 2.0, l2 = 1.5;
  for (auto [q, p] : {std::pair{2.0, 2.0}, {3.0, 1.0}, {1.0, 4.0}}) {
    auto scaled = [&](double t, const Vec& x) {
      Vec y(1);
      y[0] = l2 * x[0];
      return u(l1 * t, y);
    };
    const double lhs =
        anisotropic_norm(scaled, q, p, box1d(0, 1, -1, 1), 256);
    const double rhs = std::pow(l2, -1.0 / p) * std::pow(l1, -1.0 / q) *
                       anisotropic_norm(u, q, p, box1d(0, l1, -l2, l2), 256);
    CHECK(lhs == doctest::Approx(rhs).epsilon(5e-3));
  }
  // gradient relation picks up one extra power of the spatial factor
  const double q0 = 2.0, p0 = 3.0;
  auto scaled_grad = [&](double t, const Vec& x) {
    Vec y(1);
    y[0] = l2 * x[0];
    return l2 * ux(l1 * t, y);
  };
  const double lhs = anisotropic_norm(scaled_grad, q0, p0, box1d(0, 1, -1, 1), 256);
  const double rhs = std::pow(l2, 1.0 - 1.0 / p0) * std::pow(l1, -1.0 / q0) *
                     anisotropic_norm(ux, q0, p0, box1d(0, l1, -l2, l2), 256);
  CHECK(lhs == doctest::Approx(rhs).epsilon(5e-3));
}

TEST_CASE("anisotropic norm: argument validation") {
  auto one = [](double, const Vec&) { return 1.0; };
  CHECK_THROWS_AS(anisotropic_norm(one, 0.5, 2, box1d(0, 1, -1, 1), 16),
                  ArgumentError);
  CHECK_THROWS_AS(anisotropic_norm(one, 2, 2, box1d(1, 0, -1, 1), 16),
                  ArgumentError);
  CHECK_THROWS_AS(anisotropic_norm(one, 2, 2, box1d(0, 1, 1, -1), 16),
                  ArgumentError);
}

TEST_CASE("weight class constant and envelope synthesis") {
  ScalarField rho = [](const Vec& x) { return 1.0 + x.squaredNorm(); };
  const double c0 = weight_class_constant(rho, pt(1.0));
  CHECK(c0 > 0.3);
  CHECK(c0 <= 1.0);

  const auto ell0 = ell0_from_lyapunov(-2.0, 4.0);
  CHECK(ell0(0.0) == doctest::Approx(1.0));
  CHECK(ell0(2.0) == doctest::Approx(1.0 + 8.0));
  const auto ell0_pos = ell0_from_lyapunov(0.5, 1.0);
  CHECK(ell0_pos(2.0) == doctest::Approx(std::exp(1.0) + 2.0));
}

TEST_CASE("decay laws") {
  DecayLaw e{DecayLaw::Family::exponential, 2.0, 3.0};
  CHECK(e(1.0) == doctest::Approx(3.0 * std::exp(-2.0)));
  CHECK(e.tail_integral(1.0) == doctest::Approx(1.5 * std::exp(-2.0)));
  CHECK(e.integrable());
  DecayLaw p{DecayLaw::Family::polynomial, 2.0, 1.0};
  CHECK(p(1.0) == doctest::Approx(0.25));
  CHECK(p.tail_integral(1.0) == doctest::Approx(0.5));
  CHECK(p.integrable());
  DecayLaw slow{DecayLaw::Family::polynomial, 0.5, 1.0};
  CHECK(!slow.integrable());
}
