#include "semibound/ergodic.hpp"

#include <algorithm>
#include <cmath>

namespace semibound {

MeanSe EmpiricalMeasure::observable_mean(const Observable& phi) const {
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(samples.rows()));
  Vec row(samples.cols());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    row = samples.row(i);
    vals.push_back(phi(row));
  }
  return mean_se(vals);
}

EmpiricalMeasure estimate_invariant(const CatalogModel& model,
                                    const ErgodicConfig& config) {
  EmpiricalMeasure mu;
  double c0 = kNaN, c1 = kNaN;
  if (model.lyapunov) {
    const Vec origin = Vec::Zero(model.coeffs.dim);
    const auto samples =
        ball_points(origin, config.sample_radius, config.lyap_samples, 5);
    const LyapunovFit fit =
        lyapunov_fit(model.coeffs, *model.lyapunov, samples);
    c0 = fit.c0;
    c1 = fit.c1;
  }
  if (!config.dissipativity_override && !(c0 < 0))
    throw AssumptionError(
        "no dissipativity certificate: drift-condition fit gave c0 = " +
        std::to_string(c0) +
        " (need c0 < 0 or an explicit override)");
  mu.c0 = c0;
  mu.c1 = c1;
  mu.t_large = config.t_large_override > 0
                   ? config.t_large_override
                   : std::max(10.0, c0 < 0 ? 5.0 / std::abs(c0) : 10.0);

  SimulationConfig sim = config.sim;
  sim.horizon = mu.t_large;
  const Vec x0 = Vec::Zero(model.coeffs.dim);
  const PathEnsemble ens = simulate(model.coeffs, sim, x0);

  // pool non-diverged terminal samples
  long kept = 0;
  for (auto d : ens.diverged) kept += d ? 0 : 1;
  mu.samples.resize(kept, model.coeffs.dim);
  long r = 0;
  for (long p = 0; p < ens.paths; ++p)
    if (!ens.diverged[static_cast<std::size_t>(p)])
      mu.samples.row(r++) = ens.terminal.row(p);

  mu.mean = mu.samples.colwise().mean();
  mu.variance.resize(model.coeffs.dim);
  for (int j = 0; j < model.coeffs.dim; ++j) {
    const double m = mu.mean[j];
    double acc = 0;
    for (Eigen::Index i = 0; i < mu.samples.rows(); ++i) {
      const double d = mu.samples(i, j) - m;
      acc += d * d;
    }
    mu.variance[j] = acc / static_cast<double>(mu.samples.rows() - 1);
  }
  return mu;
}

DecayFit fit_decay(const CatalogModel& model, const Observable& phi,
                   const std::vector<Vec>& x_set,
                   std::span<const double> t_grid, DecayLaw::Family family,
                   double mu_hat, const SimulationConfig& config) {
  if (x_set.empty() || t_grid.size() < 3)
    throw ArgumentError("decay fit needs points and at least 3 times");
  DecayFit fit;
  fit.family = family;

  const std::size_t nt = t_grid.size();
  std::vector<double> signal(nt, 0), noise(nt, 0);
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());

  for (const Vec& x : x_set) {
    SimulationConfig sim = config;
    sim.horizon = t_max;
    std::vector<std::vector<double>> vals(nt);
    for (auto& v : vals)
      v.assign(static_cast<std::size_t>(sim.paths), kNaN);
    simulate_paths(model.coeffs, sim, {x}, t_grid, StepperOptions{},
                   [&](long p, const PathRecord& rec) {
                     if (rec.diverged) return;
                     for (std::size_t k = 0; k < nt; ++k)
                       vals[k][static_cast<std::size_t>(p)] =
                           phi(rec.state(0, static_cast<int>(k)));
                   });
    const double rho1x = model.weights.rho1 ? model.weights.rho1(x) : 1.0;
    for (std::size_t k = 0; k < nt; ++k) {
      auto& v = vals[k];
      v.erase(std::remove_if(v.begin(), v.end(),
                             [](double a) { return std::isnan(a); }),
              v.end());
      const MeanSe ms = mean_se(v);
      signal[k] += std::abs(ms.mean - mu_hat) / rho1x;
      noise[k] += ms.se / rho1x;
    }
  }
  for (std::size_t k = 0; k < nt; ++k) {
    signal[k] /= static_cast<double>(x_set.size());
    noise[k] /= static_cast<double>(x_set.size());
  }

  // keep the window where the signal clears the noise
  std::vector<double> xs, ys;
  fit.window_lo = kInf;
  fit.window_hi = -kInf;
  for (std::size_t k = 0; k < nt; ++k) {
    if (!(signal[k] > 5.0 * noise[k])) continue;
    const double abscissa = family == DecayLaw::Family::exponential
                                ? t_grid[k]
                                : std::log1p(t_grid[k]);
    xs.push_back(abscissa);
    ys.push_back(std::log(signal[k]));
    fit.window_lo = std::min(fit.window_lo, t_grid[k]);
    fit.window_hi = std::max(fit.window_hi, t_grid[k]);
  }
  fit.points_used = static_cast<int>(xs.size());
  if (fit.points_used < 3) {
    fit.ok = false;
    fit.message = "signal below noise over the window; fit impossible";
    return fit;
  }
  const LineFit lf = fit_line(xs, ys);
  fit.gamma = -lf.slope;
  fit.gamma_ci = 2.0 * lf.slope_se;
  fit.scale = std::exp(lf.intercept);
  fit.residual = lf.residual;
  fit.ok = fit.gamma > 0;
  if (!fit.ok) fit.message = "fitted rate is not positive";
  return fit;
}

namespace {

double matrix_norm_a(const CoefficientModel& m, const Vec& x) {
  Mat a;
  m.eval_a(0.0, x, a);
  return a.norm();
}

}  // namespace

DissipativityCertificate dissipativity_catalog_check(
    const CatalogModel& model, DissipativityCase which,
    const DissipativityParams& params) {
  DissipativityCertificate cert;
  cert.which = which;
  if (params.q < (which == DissipativityCase::a ? 2.0 : 1.0))
    throw ArgumentError("exponent q below the case's admissible range");
  if (which == DissipativityCase::c &&
      (params.p < 1.0 || params.p >= params.q))
    throw ArgumentError("case (c) needs p in [1, q)");

  const int d = model.coeffs.dim;
  Vec b(d);
  cert.holds = true;
  // radial grid out to |x| = 50, both signs of each axis plus diagonals
  std::vector<Vec> dirs;
  for (int j = 0; j < d; ++j) {
    Vec e = Vec::Zero(d);
    e[j] = 1;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (d > 1) dirs.push_back(Vec::Ones(d) / std::sqrt(double(d)));
  for (double r = 0.25; r <= 50.0; r += 0.25) {
    for (const Vec& e : dirs) {
      const Vec x = r * e;
      model.coeffs.eval_drift(0.0, x, b);
      const double an = matrix_norm_a(model.coeffs, x);
      const double bx = b.dot(x);
      double lhs;
      if (which == DissipativityCase::a)
        lhs = params.gamma * an + bx;
      else
        lhs = params.gamma * params.q * an * std::pow(r, params.q) + bx;
      const double rhs = -params.vartheta * std::pow(r, params.q) + params.c;
      cert.worst_margin = std::max(cert.worst_margin, lhs - rhs);
      if (lhs > rhs) {
        cert.holds = false;
        cert.largest_violation_radius =
            std::max(cert.largest_violation_radius, r);
      }
    }
  }
  if (!cert.holds) return cert;

  LyapunovFunction V;
  switch (which) {
    case DissipativityCase::a:
      V = quadratic_lyapunov(d);
      break;
    case DissipativityCase::b:
      V = exponential_lyapunov(d, params.gamma, params.q);
      break;
    case DissipativityCase::c:
      V = exponential_lyapunov(d, params.gamma, params.p);
      break;
  }
  cert.v_form = V.form;
  const auto samples = ball_points(Vec::Zero(d), 8.0, 800, 17);
  cert.fit = lyapunov_fit(model.coeffs, V, samples);
  cert.fit_run = true;
  return cert;
}

}  // namespace semibound
