#include "semibound/coeffs.hpp"

#include "semibound/rng.hpp"

#include <algorithm>
#include <cmath>

namespace semibound {

void CoefficientModel::eval_a(double t, const Vec& x, Mat& out) const {
  Mat s(dim, dim);
  sigma(t, x, s);
  out = s * s.transpose();
}

void CoefficientModel::eval_grad_drift(double t, const Vec& x, Mat& out) const {
  if (grad_drift) {
    grad_drift(t, x, out);
    return;
  }
  const double bump = 1e-5;
  out.resize(dim, dim);
  Vec xp = x, xm = x, bp(dim), bm(dim);
  for (int j = 0; j < dim; ++j) {
    xp[j] = x[j] + bump;
    xm[j] = x[j] - bump;
    drift(t, xp, bp);
    drift(t, xm, bm);
    out.col(j) = (bp - bm) / (2 * bump);
    xp[j] = x[j];
    xm[j] = x[j];
  }
}

double DecayLaw::operator()(double t) const {
  switch (family) {
    case Family::exponential:
      return scale * std::exp(-gamma * t);
    case Family::polynomial:
      return scale * std::pow(1.0 + t, -gamma);
  }
  return kNaN;
}

double DecayLaw::tail_integral(double T) const {
  switch (family) {
    case Family::exponential:
      return scale * std::exp(-gamma * T) / gamma;
    case Family::polynomial:
      if (gamma <= 1) return kInf;
      return scale * std::pow(1.0 + T, 1.0 - gamma) / (gamma - 1.0);
  }
  return kNaN;
}

bool DecayLaw::integrable() const {
  return family == Family::exponential ? gamma > 0 : gamma > 1;
}

const char* DecayLaw::family_name(Family f) {
  return f == Family::exponential ? "exponential" : "polynomial";
}

double WeightSpec::eval_ell0(double t) const {
  return ell0 ? ell0(t) : 1.0;
}

double WeightSpec::eval_sup_rho1(const Vec& x, std::uint64_t seed) const {
  if (sup_rho1_ball) return sup_rho1_ball(x);
  if (!rho1) return 1.0;
  double sup = rho1(x);
  for (const Vec& y : ball_points(x, 1.0, 512, seed))
    sup = std::max(sup, rho1(y));
  return sup;
}

WeightSpec unit_weights() {
  WeightSpec w;
  w.rho0 = [](const Vec&) { return 1.0; };
  w.rho1 = [](const Vec&) { return 1.0; };
  w.ell0 = [](double) { return 1.0; };
  w.sup_rho1_ball = [](const Vec&) { return 1.0; };
  w.w_constant = 1.0;
  return w;
}

std::function<double(double)> ell0_from_lyapunov(double c0, double c1) {
  const double growth = std::max(c0, 0.0);
  const double lin = std::abs(c1);
  return [growth, lin](double t) { return std::exp(growth * t) + lin * t; };
}

namespace {

double halton(long index, int base) {
  double f = 1.0, r = 0.0;
  long i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

std::vector<Vec> ball_points(const Vec& x, double radius, long count,
                             std::uint64_t seed) {
  const int d = static_cast<int>(x.size());
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  // Halton nodes in the cube, rejected to the ball; the sequence is offset by
  // the seed so distinct callers decorrelate while staying deterministic.
  const long offset = static_cast<long>(seed % 65537) + 13;
  long idx = 0;
  while (static_cast<long>(pts.size()) < count) {
    Vec y(d);
    double n2 = 0;
    for (int j = 0; j < d; ++j) {
      const double u = 2.0 * halton(offset + idx, kHaltonBases[j % 8]) - 1.0;
      y[j] = u;
      n2 += u * u;
    }
    ++idx;
    if (n2 > 1.0) continue;
    pts.push_back(x + radius * y);
    if (idx > 64 * count + 1024) break;  // d too large for rejection
  }
  return pts;
}

namespace {

Vec sample_in_ball(const Vec& x, std::uint64_t seed, std::uint64_t counter,
                   std::uint32_t stream) {
  const int d = static_cast<int>(x.size());
  Vec y(d);
  // uniform direction from normals, radius by the d-th root rule
  double n2 = 0;
  for (int j = 0; j < d; j += 2) {
    double z0, z1;
    rng_normal_pair(seed, stream, counter, 0, static_cast<std::uint32_t>(j),
                    z0, z1);
    y[j] = z0;
    if (j + 1 < d) y[j + 1] = z1;
  }
  n2 = y.squaredNorm();
  if (n2 == 0) return x;
  const double u = rng_uniform(seed, stream, counter, 1, 0);
  const double r = std::pow(u, 1.0 / d);
  return x + (r / std::sqrt(n2)) * y;
}

void check_finite(const Vec& v, const Vec& at) {
  if (!v.allFinite())
    throw EvaluationError("field evaluated to a non-finite value at " +
                          point_to_string(at));
}

}  // namespace

double local_holder_seminorm(const VectorField& f, const Vec& x, double alpha,
                             long pairs, std::uint64_t seed) {
  if (!(alpha > 0) || alpha > 1)
    throw ArgumentError("holder exponent must lie in (0,1]");
  if (pairs < 1) throw ArgumentError("pair budget must be positive");
  double best = 0;
  for (long i = 0; i < pairs; ++i) {
    const Vec y = sample_in_ball(x, seed, 2 * i, 101);
    const Vec yp = sample_in_ball(x, seed, 2 * i + 1, 101);
    const double dist = (y - yp).norm();
    if (dist < 1e-14) continue;
    const Vec fy = f(y);
    const Vec fyp = f(yp);
    check_finite(fy, y);
    check_finite(fyp, yp);
    best = std::max(best, (fy - fyp).norm() / std::pow(dist, alpha));
  }
  return best;
}

double local_lp_norm(const VectorField& b, const Vec& x, double p, long nodes,
                     std::uint64_t seed) {
  if (!(p > 1)) throw ArgumentError("integrability exponent must exceed 1");
  if (nodes < 1) throw ArgumentError("node budget must be positive");
  const int d = static_cast<int>(x.size());
  if (p == kInf) {
    double sup = 0;
    for (long i = 0; i < nodes; ++i) {
      const Vec y = sample_in_ball(x, seed, i, 103);
      const Vec by = b(y);
      check_finite(by, y);
      sup = std::max(sup, by.norm());
    }
    return sup;
  }
  const std::vector<Vec> pts = ball_points(x, 1.0, nodes, seed);
  if (pts.empty()) throw ArgumentError("no quadrature nodes in ball");
  double acc = 0;
  for (const Vec& y : pts) {
    const Vec by = b(y);
    check_finite(by, y);
    acc += std::pow(by.norm(), p);
  }
  // ball volume in d dimensions
  const double vol = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return std::pow(vol * acc / static_cast<double>(pts.size()), 1.0 / p);
}

double local_holder_norm(const VectorField& b, const Vec& x, double alpha,
                         long pairs, std::uint64_t seed) {
  const double semi = local_holder_seminorm(b, x, alpha, pairs, seed);
  const double sup = local_lp_norm(b, x, kInf, pairs, seed);
  return sup + semi;
}

double weighted_sup_norm(const ScalarField& phi, const ScalarField& rho0,
                         const std::vector<Vec>& grid) {
  if (grid.empty()) throw ArgumentError("weighted sup norm over empty grid");
  double best = 0;
  for (const Vec& x : grid) {
    const double w = rho0(x);
    if (!(w >= 1.0))
      throw ArgumentError("weight must be >= 1 on the grid");
    const double v = std::abs(phi(x)) / w;
    if (!std::isfinite(v))
      throw EvaluationError("non-finite value at " + point_to_string(x));
    best = std::max(best, v);
  }
  return best;
}

namespace {

// Composite trapezoid over [lo,hi] of g at `n` nodes; p = inf gives the max.
template <typename G>
double line_norm(const G& g, double lo, double hi, int n, double p) {
  const double h = (hi - lo) / (n - 1);
  if (p == kInf) {
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, g(lo + i * h));
    return m;
  }
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * std::pow(g(lo + i * h), p);
  }
  return std::pow(acc * h, 1.0 / p);
}

}  // namespace

double anisotropic_norm(const std::function<double(double, const Vec&)>& u,
                        double q, double p, const SpaceTimeBox& cyl,
                        int nodes_per_axis) {
  if (q < 1 || p < 1) throw ArgumentError("anisotropic exponents must be >= 1");
  if (nodes_per_axis < 2) throw ArgumentError("need at least 2 nodes per axis");
  const int d = static_cast<int>(cyl.lo.size());
  if (cyl.hi.size() != d || d < 1)
    throw ArgumentError("cylinder box is inconsistent with the dimension");
  if (!(cyl.t1 > cyl.t0)) throw ArgumentError("empty time interval");
  for (int j = 0; j < d; ++j)
    if (!(cyl.hi[j] > cyl.lo[j])) throw ArgumentError("empty spatial box");

  // recursive L^p over space axes, innermost first
  std::function<double(double, Vec&, int)> space_norm =
      [&](double t, Vec& y, int axis) -> double {
    if (axis == d) return std::abs(u(t, y));
    return line_norm(
        [&](double v) {
          y[axis] = v;
          return space_norm(t, y, axis + 1);
        },
        cyl.lo[axis], cyl.hi[axis], nodes_per_axis, p);
  };
  return line_norm(
      [&](double t) {
        Vec y = cyl.lo;
        return space_norm(t, y, 0);
      },
      cyl.t0, cyl.t1, nodes_per_axis, q);
}

LocalNormReport estimate_local_norms(const CoefficientModel& model,
                                     const Vec& x, long budget,
                                     std::uint64_t seed) {
  LocalNormReport r;
  r.center = x;
  r.alpha = model.alpha;
  r.sample_count = budget;

  const bool all_closed =
      model.holder_a_fn && model.lp_b_fn && model.holder_b_fn;
  r.method = all_closed ? NormMethod::closed_form : NormMethod::pair_sampling;

  if (model.holder_a_fn) {
    r.holder_a = model.holder_a_fn(x);
  } else {
    auto a_field = [&](const Vec& y) {
      Mat a;
      model.eval_a(0.0, y, a);
      return Vec(Eigen::Map<const Vec>(a.data(), a.size()));
    };
    r.holder_a = local_holder_seminorm(a_field, x, model.alpha, budget, seed);
  }

  auto b_field = [&](const Vec& y) {
    Vec b(model.dim);
    model.eval_drift(0.0, y, b);
    return b;
  };
  if (model.lp_b_fn) {
    r.lp_b = model.lp_b_fn(x);
  } else {
    r.lp_b = local_lp_norm(b_field, x, model.p_b, budget, seed + 1);
    if (r.lp_b > 1e15) r.unbounded_above_budget = true;
  }
  if (model.holder_b_fn) {
    r.holder_b = model.holder_b_fn(x);
  } else {
    r.holder_b = local_holder_norm(b_field, x, model.alpha, budget, seed + 2);
  }
  return r;
}

double weight_class_constant(const ScalarField& rho, const Vec& x,
                             long samples, std::uint64_t seed) {
  const double at_x = rho(x);
  if (!(at_x > 0)) return 0;
  double inf = at_x, sup = at_x;
  for (long i = 0; i < samples; ++i) {
    const Vec y = sample_in_ball(x, seed, i, 107);
    const double v = rho(y);
    inf = std::min(inf, v);
    sup = std::max(sup, v);
  }
  if (!(inf > 0)) return 0;
  return std::min(1.0, std::min(inf / at_x, at_x / sup));
}

}  // namespace semibound
