#include "semibound/semigroup.hpp"

#include <algorithm>
#include <cmath>

namespace semibound {

namespace {

struct SeriesAccumulator {
  // per checkpoint, per path
  std::vector<std::vector<double>> samples;
  std::vector<std::uint8_t> valid;

  SeriesAccumulator(std::size_t n_times, std::size_t n_paths)
      : samples(n_times), valid(n_paths, 1) {
    for (auto& s : samples) s.assign(n_paths, 0.0);
  }

  MeanSe reduce(std::size_t k) const {
    std::vector<double> kept;
    kept.reserve(valid.size());
    for (std::size_t p = 0; p < valid.size(); ++p)
      if (valid[p]) kept.push_back(samples[k][p]);
    return mean_se(kept);
  }

  double diverged_fraction() const {
    std::size_t dead = 0;
    for (auto v : valid) dead += v ? 0 : 1;
    return static_cast<double>(dead) / static_cast<double>(valid.size());
  }
};

DerivativeEstimate make_estimate(int order, int rows, int cols,
                                 EstimatorKind kind, long paths, double bump) {
  DerivativeEstimate e;
  e.order = order;
  e.value.setZero(rows, cols);
  e.se.setZero(rows, cols);
  e.bias.setZero(rows, cols);
  e.estimator = kind;
  e.paths = paths;
  e.bump = bump;
  return e;
}

double pilot_se(const CoefficientModel& model, const Observable& phi, double t,
                const Vec& x, const SimulationConfig& config) {
  SimulationConfig pilot = config;
  pilot.paths = std::min<long>(config.paths, 20000);
  pilot.stream = config.stream + 7919;
  pilot.horizon = t;
  SeriesAccumulator acc(1, static_cast<std::size_t>(pilot.paths));
  const std::vector<double> ts = {t};
  simulate_paths(model, pilot, {x}, ts, StepperOptions{},
                 [&](long p, const PathRecord& rec) {
                   if (rec.diverged) {
                     acc.valid[static_cast<std::size_t>(p)] = 0;
                     return;
                   }
                   acc.samples[0][static_cast<std::size_t>(p)] =
                       phi(rec.state(0, 0));
                 });
  return acc.reduce(0).se;
}

double auto_delta(const CoefficientModel& model, const Observable& phi,
                  double t, const Vec& x, const SimulationConfig& config) {
  const double se0 = pilot_se(model, phi, t, x, config);
  return std::max(1e-3, std::sqrt(se0));
}

}  // namespace

DerivativeEstimate estimate_semigroup(const CoefficientModel& model,
                                      const Observable& phi, double t,
                                      const Vec& x,
                                      const SimulationConfig& config) {
  SimulationConfig cfg = config;
  cfg.horizon = t;
  SeriesAccumulator acc(1, static_cast<std::size_t>(cfg.paths));
  const std::vector<double> ts = {t};
  simulate_paths(model, cfg, {x}, ts, StepperOptions{},
                 [&](long p, const PathRecord& rec) {
                   if (rec.diverged) {
                     acc.valid[static_cast<std::size_t>(p)] = 0;
                     return;
                   }
                   acc.samples[0][static_cast<std::size_t>(p)] =
                       phi(rec.state(0, 0));
                 });
  DerivativeEstimate e =
      make_estimate(0, 1, 1, EstimatorKind::fd_crn, cfg.paths, 0);
  const MeanSe ms = acc.reduce(0);
  e.value(0, 0) = ms.mean;
  e.se(0, 0) = ms.se;
  e.diverged_fraction = acc.diverged_fraction();
  return e;
}

std::vector<DerivativeEstimate> estimate_gradient_series(
    const CoefficientModel& model, const Observable& phi,
    std::span<const double> times, const Vec& x, const SimulationConfig& config,
    double delta) {
  if (times.empty()) throw ArgumentError("gradient series needs times");
  const double t_max = *std::max_element(times.begin(), times.end());
  if (delta <= 0) delta = auto_delta(model, phi, t_max, x, config);

  SimulationConfig cfg = config;
  cfg.horizon = t_max;
  const int d = model.dim;

  // copies: for each axis, x +/- delta and x +/- 2 delta
  std::vector<Vec> x0s;
  for (int j = 0; j < d; ++j) {
    for (double mult : {1.0, -1.0, 2.0, -2.0}) {
      Vec y = x;
      y[j] += mult * delta;
      x0s.push_back(y);
    }
  }

  const std::size_t nt = times.size();
  const std::size_t np = static_cast<std::size_t>(cfg.paths);
  // per (time, axis): difference quotients at delta and 2 delta
  std::vector<SeriesAccumulator> acc1(d, SeriesAccumulator(nt, np));
  std::vector<SeriesAccumulator> acc2(d, SeriesAccumulator(nt, np));

  const auto snapped =
      simulate_paths(model, cfg, x0s, times, StepperOptions{},
                     [&](long p, const PathRecord& rec) {
                       const auto pi = static_cast<std::size_t>(p);
                       if (rec.diverged) {
                         for (int j = 0; j < d; ++j) {
                           acc1[j].valid[pi] = 0;
                           acc2[j].valid[pi] = 0;
                         }
                         return;
                       }
                       for (int j = 0; j < d; ++j) {
                         const int base = 4 * j;
                         for (std::size_t k = 0; k < nt; ++k) {
                           const double fp = phi(rec.state(base + 0, k));
                           const double fm = phi(rec.state(base + 1, k));
                           const double fp2 = phi(rec.state(base + 2, k));
                           const double fm2 = phi(rec.state(base + 3, k));
                           acc1[j].samples[k][pi] = (fp - fm) / (2 * delta);
                           acc2[j].samples[k][pi] = (fp2 - fm2) / (4 * delta);
                         }
                       }
                     });
  (void)snapped;

  std::vector<DerivativeEstimate> out;
  out.reserve(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    DerivativeEstimate e =
        make_estimate(1, d, 1, EstimatorKind::fd_crn, cfg.paths, delta);
    for (int j = 0; j < d; ++j) {
      const MeanSe m1 = acc1[j].reduce(k);
      const MeanSe m2 = acc2[j].reduce(k);
      e.value(j, 0) = m1.mean;
      e.se(j, 0) = m1.se;
      e.bias(j, 0) = std::abs(m1.mean - m2.mean) / 3.0;
      if (m1.se > std::abs(m1.mean)) e.noise_floor_warning = true;
    }
    e.diverged_fraction = acc1[0].diverged_fraction();
    out.push_back(std::move(e));
  }
  return out;
}

DerivativeEstimate estimate_gradient_fd(const CoefficientModel& model,
                                        const Observable& phi, double t,
                                        const Vec& x,
                                        const SimulationConfig& config,
                                        double delta) {
  const std::vector<double> ts = {t};
  return estimate_gradient_series(model, phi, ts, x, config, delta).front();
}

DerivativeEstimate estimate_gradient_bismut(const CoefficientModel& model,
                                            const Observable& phi, double t,
                                            const Vec& x,
                                            const SimulationConfig& config) {
  SimulationConfig cfg = config;
  cfg.horizon = t;
  const int d = model.dim;
  StepperOptions opts;
  opts.jacobian = true;
  opts.bismut = true;
  const std::size_t np = static_cast<std::size_t>(cfg.paths);
  std::vector<SeriesAccumulator> acc(d, SeriesAccumulator(1, np));
  const std::vector<double> ts = {t};
  simulate_paths(model, cfg, {x}, ts, opts, [&](long p, const PathRecord& rec) {
    const auto pi = static_cast<std::size_t>(p);
    if (rec.diverged) {
      for (int j = 0; j < d; ++j) acc[j].valid[pi] = 0;
      return;
    }
    const double f = phi(rec.state(0, 0));
    const Vec& m = rec.bismut_weight(0, 0);
    for (int j = 0; j < d; ++j) acc[j].samples[0][pi] = f * m[j] / t;
  });
  DerivativeEstimate e =
      make_estimate(1, d, 1, EstimatorKind::bismut, cfg.paths, 0);
  for (int j = 0; j < d; ++j) {
    const MeanSe ms = acc[j].reduce(0);
    e.value(j, 0) = ms.mean;
    e.se(j, 0) = ms.se;
  }
  e.diverged_fraction = acc[0].diverged_fraction();
  return e;
}

std::vector<DerivativeEstimate> estimate_hessian_series(
    const CoefficientModel& model, const Observable& phi,
    std::span<const double> times, const Vec& x, const SimulationConfig& config,
    double delta) {
  if (delta <= 0) throw ArgumentError("hessian stencil needs delta > 0");
  if (times.empty()) throw ArgumentError("hessian series needs times");
  const double t_max = *std::max_element(times.begin(), times.end());
  SimulationConfig cfg = config;
  cfg.horizon = t_max;
  const int d = model.dim;

  // copies: center, +/- delta per axis, then (+,+),(+,-),(-,+),(-,-) per pair
  std::vector<Vec> x0s = {x};
  for (int j = 0; j < d; ++j) {
    Vec p = x, m = x;
    p[j] += delta;
    m[j] -= delta;
    x0s.push_back(p);
    x0s.push_back(m);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      pairs.emplace_back(i, j);
      for (double si : {1.0, -1.0})
        for (double sj : {1.0, -1.0}) {
          Vec y = x;
          y[i] += si * delta;
          y[j] += sj * delta;
          x0s.push_back(y);
        }
    }

  const std::size_t nt = times.size();
  const std::size_t np = static_cast<std::size_t>(cfg.paths);
  const int n_entries = d + static_cast<int>(pairs.size());
  std::vector<SeriesAccumulator> acc(n_entries, SeriesAccumulator(nt, np));

  simulate_paths(
      model, cfg, x0s, times, StepperOptions{},
      [&](long p, const PathRecord& rec) {
        const auto pi = static_cast<std::size_t>(p);
        if (rec.diverged) {
          for (auto& a : acc) a.valid[pi] = 0;
          return;
        }
        for (std::size_t k = 0; k < nt; ++k) {
          const double f0 = phi(rec.state(0, k));
          for (int j = 0; j < d; ++j) {
            const double fp = phi(rec.state(1 + 2 * j, k));
            const double fm = phi(rec.state(2 + 2 * j, k));
            acc[j].samples[k][pi] = (fp - 2 * f0 + fm) / (delta * delta);
          }
          int base = 1 + 2 * d;
          for (std::size_t q = 0; q < pairs.size(); ++q) {
            const double fpp = phi(rec.state(base + 0, k));
            const double fpm = phi(rec.state(base + 1, k));
            const double fmp = phi(rec.state(base + 2, k));
            const double fmm = phi(rec.state(base + 3, k));
            acc[d + q].samples[k][pi] =
                (fpp - fpm - fmp + fmm) / (4 * delta * delta);
            base += 4;
          }
        }
      });

  std::vector<DerivativeEstimate> out;
  out.reserve(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    DerivativeEstimate e =
        make_estimate(2, d, d, EstimatorKind::fd_crn, cfg.paths, delta);
    for (int j = 0; j < d; ++j) {
      const MeanSe ms = acc[j].reduce(k);
      e.value(j, j) = ms.mean;
      e.se(j, j) = ms.se;
      if (ms.se > std::abs(ms.mean)) e.noise_floor_warning = true;
    }
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const MeanSe ms = acc[d + q].reduce(k);
      const auto [i, j] = pairs[q];
      e.value(i, j) = e.value(j, i) = ms.mean;
      e.se(i, j) = e.se(j, i) = ms.se;
    }
    e.diverged_fraction = acc[0].diverged_fraction();
    out.push_back(std::move(e));
  }
  return out;
}

DerivativeEstimate estimate_hessian_fd(const CoefficientModel& model,
                                       const Observable& phi, double t,
                                       const Vec& x,
                                       const SimulationConfig& config,
                                       double delta) {
  const std::vector<double> ts = {t};
  return estimate_hessian_series(model, phi, ts, x, config, delta).front();
}

double hessian_seminorm_mc(const CoefficientModel& model, const Observable& phi,
                           double t, const Vec& x, double beta,
                           const SimulationConfig& config, double delta,
                           int mesh_points) {
  const std::vector<Vec> mesh = ball_points(x, 0.5, mesh_points, 23);
  std::vector<Mat> hessians;
  hessians.reserve(mesh.size());
  SimulationConfig cfg = config;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    cfg.stream = config.stream + static_cast<std::uint32_t>(i + 1);
    hessians.push_back(
        estimate_hessian_fd(model, phi, t, mesh[i], cfg, delta).value);
  }
  double best = 0;
  if (beta == 0) {
    for (const Mat& h : hessians) best = std::max(best, h.norm());
    return best;
  }
  for (std::size_t i = 0; i < mesh.size(); ++i)
    for (std::size_t j = i + 1; j < mesh.size(); ++j) {
      const double dist = (mesh[i] - mesh[j]).norm();
      if (dist < 1e-12) continue;
      best = std::max(best, (hessians[i] - hessians[j]).norm() /
                                std::pow(dist, beta));
    }
  return best;
}

const char* bound_kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::grad_short:
      return "grad_short";
    case BoundKind::hess_short:
      return "hess_short";
    case BoundKind::grad_long:
      return "grad_long";
    case BoundKind::hess_long:
      return "hess_long";
  }
  return "?";
}

VerificationReport verify_bound(const CoefficientModel& model,
                                const WeightSpec& weights,
                                const Observable& phi,
                                std::span<const double> t_grid,
                                const std::vector<Vec>& x_grid, BoundKind which,
                                const VerifyConfig& cfg) {
  if (t_grid.empty() || x_grid.empty())
    throw ArgumentError("verification grid is empty");
  VerificationReport rep;
  rep.which = which;
  rep.scaling_target = cfg.scaling_target;
  rep.scaling_tol = cfg.scaling_tol;

  const bool gradient =
      which == BoundKind::grad_short || which == BoundKind::grad_long;
  const bool longtime =
      which == BoundKind::grad_long || which == BoundKind::hess_long;
  const double phi_norm = std::isfinite(phi.sup_norm) ? phi.sup_norm : 1.0;

  Observable obs = phi;
  if (longtime && cfg.mu_hat != 0) {
    // centered observable; derivative estimators are shift-invariant but the
    // reports carry the centered values
    const Observable inner = phi;
    const double mu = cfg.mu_hat;
    obs.kind = ObsKind::custom;
    obs.fn = [inner, mu](double u) { return inner.eval(u) - mu; };
    obs.dfn = nullptr;
  }

  for (const Vec& x : x_grid) {
    BoundInputs in = make_bound_inputs(model, weights, t_grid[0], x, phi_norm,
                                       cfg.norm_budget);
    in.epsilon = cfg.epsilon;

    std::vector<DerivativeEstimate> est;
    if (gradient)
      est = estimate_gradient_series(model, obs, t_grid, x, cfg.sim, cfg.delta);
    else
      est = estimate_hessian_series(model, obs, t_grid, x, cfg.sim, cfg.delta);

    for (std::size_t k = 0; k < t_grid.size(); ++k) {
      VerificationCell cell;
      cell.t = t_grid[k];
      cell.x = x;
      cell.measured = est[k].value.norm();
      cell.se = est[k].se.norm();
      in.t = cell.t;
      in.horizon_S = kNaN;
      in.horizon_T = kNaN;
      switch (which) {
        case BoundKind::grad_short:
          cell.rhs = grad_rhs(in);
          break;
        case BoundKind::hess_short:
          cell.rhs = hess_rhs(in, 0.0);
          break;
        case BoundKind::grad_long:
          cell.rhs = longtime_grad_rhs(in);
          break;
        case BoundKind::hess_long:
          cell.rhs = longtime_hess_rhs(in, 0.0);
          break;
      }
      cell.ratio = cell.measured / cell.rhs;
      rep.cells.push_back(std::move(cell));
    }
  }

  // scaling fits on cells with usable signal
  std::vector<double> log_t, log_m, tt, log_ratio, log_rhs;
  for (const auto& c : rep.cells) {
    rep.ratio_sup = std::max(rep.ratio_sup, c.ratio);
    if (c.measured > 3 * c.se && c.measured > 0) {
      log_t.push_back(std::log(c.t));
      log_m.push_back(std::log(c.measured));
      tt.push_back(c.t);
      log_ratio.push_back(std::log(c.ratio));
      log_rhs.push_back(std::log(c.rhs));
    }
  }
  rep.time_scaling = fit_line(log_t, log_m);
  rep.decay_rate = fit_line(tt, log_m);
  rep.rhs_tracking = fit_line(log_rhs, log_m);
  rep.ratio_trend = fit_line(log_t, log_ratio);

  rep.pass_finite = true;
  for (const auto& c : rep.cells)
    if (!std::isfinite(c.ratio)) rep.pass_finite = false;
  rep.pass_no_uptrend = rep.ratio_trend.slope >= cfg.ratio_trend_floor;
  if (cfg.scaling_target) {
    const double got =
        longtime ? -rep.decay_rate.slope : rep.time_scaling.slope;
    rep.pass_scaling = std::abs(got - *cfg.scaling_target) <= cfg.scaling_tol;
  }
  return rep;
}

}  // namespace semibound
