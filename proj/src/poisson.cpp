#include "semibound/poisson.hpp"

#include "semibound/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace semibound {

namespace {

std::vector<double> geometric_grid(double t0, double ratio, double T) {
  std::vector<double> ts = {0.0, t0};
  double t = t0;
  while (t < T) {
    t = std::min(t * ratio, T);
    ts.push_back(t);
    if (ts.size() > 4000) throw ArgumentError("time grid too fine");
  }
  return ts;
}

std::vector<double> trapezoid_weights(const std::vector<double>& ts) {
  const std::size_t n = ts.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dt = ts[k + 1] - ts[k];
    w[k] += 0.5 * dt;
    w[k + 1] += 0.5 * dt;
  }
  return w;
}

struct CenteringResult {
  double mu = 0;
  double se = 0;
  EmpiricalMeasure measure;
};

CenteringResult center_forcing(const CatalogModel& model, const Observable& f,
                               const PoissonConfig& config) {
  ErgodicConfig ec;
  ec.sim = config.sim;
  if (config.mu_paths > 0) ec.sim.paths = config.mu_paths;
  ec.sim.stream = config.sim.stream + 1001;
  CenteringResult out;
  out.measure = estimate_invariant(model, ec);  // throws without certificate
  const MeanSe ms = out.measure.observable_mean(f);
  out.mu = ms.mean;
  out.se = ms.se;
  if (ms.se > config.max_centering_se) {
    const double needed = static_cast<double>(ec.sim.paths) *
                          (ms.se / config.max_centering_se) *
                          (ms.se / config.max_centering_se);
    throw ConfigError(
        "centering standard error " + std::to_string(ms.se) +
        " exceeds the cap; roughly " + std::to_string(needed) +
        " invariant-measure paths would be required");
  }
  return out;
}

DecayFit fit_forcing_decay(const CatalogModel& model, const Observable& f,
                           const std::vector<Vec>& points, double mu,
                           const PoissonConfig& config) {
  std::vector<double> t_grid;
  for (double t = 0.25; t <= 8.0; t += 0.25) t_grid.push_back(t);
  SimulationConfig sim = config.sim;
  sim.paths = std::max<long>(sim.paths / 4, 20000);
  sim.stream = config.sim.stream + 1002;
  const DecayLaw::Family family =
      model.ell1_family.value_or(DecayLaw::Family::exponential);
  DecayFit fit = fit_decay(model, f, points, t_grid, family, mu, sim);
  if (!fit.ok)
    throw AssumptionError("decay of the recentred forcing could not be fitted: " +
                          fit.message);
  if (!fit.law().integrable())
    throw AssumptionError("fitted decay law is not integrable");
  return fit;
}

}  // namespace

PoissonSolution solve_poisson(const CatalogModel& model, const Observable& f,
                              const std::vector<Vec>& points,
                              const PoissonConfig& config) {
  if (points.empty()) throw ArgumentError("no evaluation points");
  PoissonSolution sol;

  const CenteringResult centering = center_forcing(model, f, config);
  sol.mu_f = centering.mu;
  sol.mu_f_se = centering.se;

  sol.decay = fit_forcing_decay(model, f, points, sol.mu_f, config);
  const DecayLaw law = sol.decay.law();
  double T = std::max(1.0, 2.0 / std::max(sol.decay.gamma, 1e-3));
  while (law.tail_integral(T) > config.tail_tol && T < config.max_T) T *= 1.25;
  sol.T_max = T;
  const double tail = law.tail_integral(T);

  sol.time_grid = geometric_grid(config.t0, config.grid_ratio, T);
  const auto weights = trapezoid_weights(sol.time_grid);
  // coarse grid (every other interior node) for the quadrature error estimate
  std::vector<double> coarse_ts = {0.0};
  for (std::size_t k = 1; k < sol.time_grid.size(); k += 2)
    coarse_ts.push_back(sol.time_grid[k]);
  if (coarse_ts.back() != sol.time_grid.back())
    coarse_ts.push_back(sol.time_grid.back());
  const auto coarse_w = trapezoid_weights(coarse_ts);

  const double mu = sol.mu_f;
  const double delta = config.grad_delta;
  const std::size_t nt = sol.time_grid.size();

  for (const Vec& x : points) {
    SimulationConfig sim = config.sim;
    sim.horizon = T;
    const std::size_t np = static_cast<std::size_t>(sim.paths);

    Vec xp = x, xm = x;
    xp[0] += delta;
    xm[0] -= delta;
    const std::vector<Vec> copies = {x, xp, xm};

    std::vector<double> u_fine(np, kNaN), u_coarse(np, kNaN), g_diff(np, kNaN);
    // map fine index -> coarse weight (0 when absent)
    std::vector<double> coarse_w_on_fine(nt, 0.0);
    {
      std::size_t ci = 0;
      for (std::size_t k = 0; k < nt; ++k)
        if (ci < coarse_ts.size() && sol.time_grid[k] == coarse_ts[ci])
          coarse_w_on_fine[k] = coarse_w[ci++];
    }

    simulate_paths(model.coeffs, sim, copies, sol.time_grid, StepperOptions{},
                   [&](long p, const PathRecord& rec) {
                     if (rec.diverged) return;
                     double acc = 0, acc_c = 0, accp = 0, accm = 0;
                     for (std::size_t k = 0; k < nt; ++k) {
                       const double v0 =
                           f(rec.state(0, static_cast<int>(k))) - mu;
                       acc += weights[k] * v0;
                       acc_c += coarse_w_on_fine[k] * v0;
                       accp += weights[k] *
                               (f(rec.state(1, static_cast<int>(k))) - mu);
                       accm += weights[k] *
                               (f(rec.state(2, static_cast<int>(k))) - mu);
                     }
                     const auto pi = static_cast<std::size_t>(p);
                     u_fine[pi] = acc;
                     u_coarse[pi] = acc_c;
                     g_diff[pi] = (accp - accm) / (2 * delta);
                   });

    auto strip = [](std::vector<double>& v) {
      v.erase(std::remove_if(v.begin(), v.end(),
                             [](double a) { return std::isnan(a); }),
              v.end());
    };
    strip(u_fine);
    strip(u_coarse);
    strip(g_diff);

    PoissonPointValue pv;
    pv.x = x;
    const MeanSe mf = mean_se(u_fine);
    const MeanSe mc = mean_se(u_coarse);
    const MeanSe mg = mean_se(g_diff);
    pv.u = mf.mean;
    pv.se = mf.se;
    pv.quad_err = std::abs(mf.mean - mc.mean) / 3.0;
    pv.tail_err = tail;
    pv.grad = mg.mean;
    pv.grad_se = mg.se;
    sol.points.push_back(std::move(pv));
  }
  return sol;
}

ResidualReport residual_check(const CatalogModel& model, const Observable& f,
                              const std::vector<Vec>& points,
                              const PoissonConfig& config) {
  if (model.coeffs.dim != 1)
    throw ArgumentError("residual check uses a one-dimensional stencil");
  ResidualReport rep;

  const CenteringResult centering = center_forcing(model, f, config);
  const double mu = centering.mu;
  const DecayFit decay = fit_forcing_decay(model, f, points, mu, config);
  const DecayLaw law = decay.law();
  double T = std::max(1.0, 2.0 / std::max(decay.gamma, 1e-3));
  while (law.tail_integral(T) > config.tail_tol && T < config.max_T) T *= 1.25;

  const auto ts = geometric_grid(config.t0, config.grid_ratio, T);
  const auto weights = trapezoid_weights(ts);
  const std::size_t nt = ts.size();
  const double eta = config.residual_eta;

  for (const Vec& x : points)
    rep.sup_f = std::max(rep.sup_f, std::abs(f(x)));

  for (const Vec& x : points) {
    SimulationConfig sim = config.sim;
    sim.horizon = T;
    Vec xp = x, xm = x;
    xp[0] += eta;
    xm[0] -= eta;
    const std::vector<Vec> copies = {x, xp, xm};
    std::vector<double> resid(static_cast<std::size_t>(sim.paths), kNaN);

    Mat a(1, 1);
    Vec b(1);
    model.coeffs.eval_a(0.0, x, a);
    model.coeffs.eval_drift(0.0, x, b);
    const double ax = a(0, 0), bx = b[0], fx = f(x);

    simulate_paths(model.coeffs, sim, copies, ts, StepperOptions{},
                   [&](long p, const PathRecord& rec) {
                     if (rec.diverged) return;
                     double u0 = 0, up = 0, um = 0;
                     for (std::size_t k = 0; k < nt; ++k) {
                       u0 += weights[k] *
                             (f(rec.state(0, static_cast<int>(k))) - mu);
                       up += weights[k] *
                             (f(rec.state(1, static_cast<int>(k))) - mu);
                       um += weights[k] *
                             (f(rec.state(2, static_cast<int>(k))) - mu);
                     }
                     const double upp = (up - 2 * u0 + um) / (eta * eta);
                     const double upr = (up - um) / (2 * eta);
                     resid[static_cast<std::size_t>(p)] =
                         ax * upp + bx * upr + fx;
                   });
    resid.erase(std::remove_if(resid.begin(), resid.end(),
                               [](double a_) { return std::isnan(a_); }),
                resid.end());
    const MeanSe ms = mean_se(resid);
    ResidualPoint rp;
    rp.x = x;
    rp.residual = ms.mean;
    rp.se = ms.se;
    rp.relative = std::abs(ms.mean) / std::max(rep.sup_f, 1e-300);
    rp.inconclusive = ms.se > std::abs(ms.mean) && ms.se > 0.02 * rep.sup_f;
    rep.max_relative = std::max(rep.max_relative, rp.relative);
    rep.points.push_back(std::move(rp));
  }
  return rep;
}

PoissonVerifyReport poisson_gradient_verify(const CatalogModel& model,
                                            const Observable& f,
                                            const std::vector<Vec>& points,
                                            const PoissonConfig& config,
                                            double epsilon) {
  PoissonVerifyReport rep;
  PoissonSolution sol = solve_poisson(model, f, points, config);

  const double f_norm = std::isfinite(f.sup_norm) ? f.sup_norm : 1.0;
  for (const auto& pv : sol.points) {
    BoundInputs in = make_bound_inputs(model.coeffs, model.weights, 1.0, pv.x,
                                       f_norm);
    in.epsilon = epsilon;
    in.weights.ell1 = sol.decay.law();
    PoissonVerifyCell cell;
    cell.x = pv.x;
    cell.measured = std::abs(pv.grad);
    cell.se = pv.grad_se;
    cell.rhs = poisson_grad_rhs(in);
    cell.ratio = cell.measured / cell.rhs;
    rep.ratio_sup = std::max(rep.ratio_sup, cell.ratio);
    rep.cells.push_back(std::move(cell));
  }
  rep.pass_finite = true;
  for (const auto& c : rep.cells)
    if (!std::isfinite(c.ratio)) rep.pass_finite = false;
  return rep;
}

}  // namespace semibound
