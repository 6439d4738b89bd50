#include "semibound/sde.hpp"

#include "semibound/parallel.hpp"
#include "semibound/rng.hpp"
#include "semibound/summation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace semibound {

namespace {

struct StepPlan {
  long steps;
  double h;
  std::vector<long> checkpoint_steps;  // indices into [0, steps]
  std::vector<double> snapped_times;
};

StepPlan plan_steps(const SimulationConfig& config,
                    std::span<const double> checkpoints) {
  if (!(config.step > 0)) throw ArgumentError("step must be positive");
  if (!(config.horizon > 0)) throw ArgumentError("horizon must be positive");
  if (config.step > config.horizon)
    throw ArgumentError("step exceeds the horizon");
  StepPlan plan;
  plan.steps = std::max<long>(1, std::lround(config.horizon / config.step));
  plan.h = config.horizon / static_cast<double>(plan.steps);
  for (double t : checkpoints) {
    if (t < 0 || t > config.horizon + 1e-12)
      throw ArgumentError("checkpoint outside [0, horizon]");
    long k = std::lround(t / plan.h);
    k = std::clamp<long>(k, 0, plan.steps);
    plan.checkpoint_steps.push_back(k);
    plan.snapped_times.push_back(k * plan.h);
  }
  if (checkpoints.empty()) {
    plan.checkpoint_steps.push_back(plan.steps);
    plan.snapped_times.push_back(config.horizon);
  }
  return plan;
}

// Sequential normal draws for one path: two per Philox block.
class NoiseCursor {
 public:
  NoiseCursor(std::uint64_t seed, std::uint32_t stream, long path)
      : seed_(seed), stream_(stream), path_(static_cast<std::uint64_t>(path)) {}

  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double z0;
    rng_normal_pair(seed_, stream_, path_, block_++, 0, z0, spare_);
    have_ = true;
    return z0;
  }

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::uint64_t path_;
  std::uint64_t block_ = 0;
  double spare_ = 0;
  bool have_ = false;
};

}  // namespace

std::vector<double> simulate_paths(const CoefficientModel& model,
                                   const SimulationConfig& config,
                                   const std::vector<Vec>& x0s,
                                   std::span<const double> checkpoints,
                                   const StepperOptions& opts,
                                   const PathFn& per_path) {
  if (x0s.empty()) throw ArgumentError("need at least one initial state");
  if (config.paths < 1) throw ArgumentError("need at least one path");
  const int dim = model.dim;
  const int copies = static_cast<int>(x0s.size());
  for (const Vec& x0 : x0s)
    if (x0.size() != dim) throw ArgumentError("initial state dimension mismatch");

  const StepPlan plan = plan_steps(config, checkpoints);
  const double budget = static_cast<double>(config.paths) *
                        static_cast<double>(plan.steps) * copies;
  if (budget > config.budget_cap)
    throw SimulationError("paths*steps*copies exceeds the configured budget cap");
  if (model.drift_growth == DriftGrowth::superlinear &&
      config.scheme != Scheme::tamed_euler)
    throw ArgumentError("superlinear drift requires the tamed scheme");

  {
    Vec b(dim);
    Mat s(dim, dim);
    model.eval_drift(0.0, x0s[0], b);
    model.eval_sigma(0.0, x0s[0], s);
    if (!b.allFinite() || !s.allFinite())
      throw EvaluationError("coefficients non-finite at the initial state " +
                            point_to_string(x0s[0]));
  }

  const bool tamed = config.scheme == Scheme::tamed_euler;
  const bool need_sigma_inverse = opts.bismut;
  const double h = plan.h;
  const double sqrt_h = std::sqrt(h);
  const double sqrt_2h = std::sqrt(2.0 * h);
  const int n_ck = static_cast<int>(plan.checkpoint_steps.size());

  std::atomic<long> diverged_count{0};

  auto run_block = [&](std::size_t lo, std::size_t hi) {
    PathRecord rec;
    rec.copies = copies;
    rec.dim = dim;
    rec.n_checkpoints = n_ck;
    rec.states.assign(static_cast<std::size_t>(copies) * n_ck, Vec(dim));
    if (opts.jacobian || opts.bismut)
      rec.jacobians.assign(static_cast<std::size_t>(copies) * n_ck,
                           Mat(dim, dim));
    if (opts.bismut)
      rec.bismut.assign(static_cast<std::size_t>(copies) * n_ck, Vec(dim));
    if (opts.integrand)
      rec.integrals.assign(static_cast<std::size_t>(copies) * n_ck, 0.0);

    std::vector<double> I(opts.integrand ? copies : 0, 0.0);
    std::vector<Vec> x(copies, Vec(dim));
    std::vector<Mat> J(opts.jacobian || opts.bismut ? copies : 0,
                       Mat(dim, dim));
    std::vector<Vec> M(opts.bismut ? copies : 0, Vec(dim));
    Vec z(dim), b(dim), incr(dim);
    Mat sig(dim, dim), sig_inv(dim, dim), gb(dim, dim), dmap(dim, dim);
    const double t0 = 0.0;
    const bool frozen_sigma = model.constant_sigma;
    if (frozen_sigma) {
      model.eval_sigma(0.0, x0s[0], sig);
      if (need_sigma_inverse) sig_inv = sig.inverse();
    }

    for (std::size_t p = lo; p < hi; ++p) {
      for (int c = 0; c < copies; ++c) {
        x[c] = x0s[c];
        if (!J.empty()) J[c].setIdentity();
        if (!M.empty()) M[c].setZero();
        if (!I.empty()) I[c] = 0;
      }
      bool dead = false;
      NoiseCursor noise(config.seed, config.stream, static_cast<long>(p));

      auto record = [&](long step_idx) {
        for (int ci = 0; ci < n_ck; ++ci) {
          if (plan.checkpoint_steps[ci] != step_idx) continue;
          for (int c = 0; c < copies; ++c) {
            rec.states[static_cast<std::size_t>(c) * n_ck + ci] = x[c];
            if (!J.empty())
              rec.jacobians[static_cast<std::size_t>(c) * n_ck + ci] = J[c];
            if (!M.empty())
              rec.bismut[static_cast<std::size_t>(c) * n_ck + ci] = M[c];
            if (!I.empty())
              rec.integrals[static_cast<std::size_t>(c) * n_ck + ci] = I[c];
          }
        }
      };

      record(0);
      for (long k = 0; k < plan.steps && !dead; ++k) {
        for (int j = 0; j < dim; ++j) z[j] = noise.next();
        const double t = t0 + k * h;
        for (int c = 0; c < copies; ++c) {
          if (!I.empty()) I[c] += h * opts.integrand(x[c]);
          model.eval_drift(t, x[c], b);
          double tame = 1.0;
          if (tamed) tame = 1.0 / (1.0 + h * b.norm());
          if (!frozen_sigma) {
            model.eval_sigma(t, x[c], sig);
            if (need_sigma_inverse) sig_inv = sig.inverse();
          }
          if (!J.empty()) {
            model.eval_grad_drift(t, x[c], gb);
            if (tamed) {
              // derivative of the tamed increment map x -> h b/(1+h|b|)
              const double nb = b.norm();
              dmap = (h * tame) * gb;
              if (nb > 0)
                dmap.noalias() -=
                    (h * h * tame * tame / nb) * (b * (b.transpose() * gb));
              J[c] = J[c] + dmap * J[c];
            } else {
              J[c] = J[c] + (h * gb) * J[c];
            }
          }
          if (!M.empty()) {
            // d M = (sigma^{-1} J)^T dW / sqrt(2)
            M[c].noalias() +=
                (sqrt_h / std::sqrt(2.0)) * (J[c].transpose() * (sig_inv.transpose() * z));
          }
          incr.noalias() = (h * tame) * b;
          incr.noalias() += sqrt_2h * (sig * z);
          x[c] += incr;
          if (!x[c].allFinite() || x[c].norm() > config.divergence_threshold) {
            dead = true;
            break;
          }
        }
        if (!dead) record(k + 1);
      }
      rec.diverged = dead;
      if (dead) diverged_count.fetch_add(1, std::memory_order_relaxed);
      per_path(static_cast<long>(p), rec);
    }
  };

  parallel_blocks(static_cast<std::size_t>(config.paths), 4096, config.workers,
                  run_block);

  const double frac = static_cast<double>(diverged_count.load()) /
                      static_cast<double>(config.paths);
  if (frac > config.max_diverged_fraction)
    throw SimulationError("diverged under scheme: " +
                          std::to_string(100.0 * frac) +
                          "% of paths left the finite range");
  return plan.snapped_times;
}

PathEnsemble simulate(const CoefficientModel& model,
                      const SimulationConfig& config, const Vec& x0,
                      std::span<const double> checkpoints) {
  PathEnsemble ens;
  ens.paths = config.paths;
  ens.dim = model.dim;
  ens.horizon = config.horizon;
  ens.seed = config.seed;
  ens.stream = config.stream;
  ens.diverged.assign(static_cast<std::size_t>(config.paths), 0);

  std::vector<double> times(checkpoints.begin(), checkpoints.end());
  const bool explicit_ck = !times.empty();
  if (!explicit_ck) times.push_back(config.horizon);

  std::vector<Mat> stores(times.size());
  for (auto& m : stores) m.setZero(config.paths, model.dim);

  const auto snapped = simulate_paths(
      model, config, {x0}, times, StepperOptions{},
      [&](long p, const PathRecord& rec) {
        ens.diverged[static_cast<std::size_t>(p)] = rec.diverged ? 1 : 0;
        for (int k = 0; k < rec.n_checkpoints; ++k)
          stores[static_cast<std::size_t>(k)].row(p) = rec.state(0, k);
      });

  ens.checkpoint_times = snapped;
  ens.checkpoint_states = std::move(stores);
  ens.terminal = ens.checkpoint_states.back();
  long dead = 0;
  for (auto d : ens.diverged) dead += d;
  ens.diverged_fraction =
      static_cast<double>(dead) / static_cast<double>(config.paths);
  return ens;
}

JacobianFlowResult jacobian_flow(const CoefficientModel& model,
                                 const SimulationConfig& config, const Vec& x0,
                                 std::span<const double> times) {
  JacobianFlowResult out;
  out.jacobians.assign(static_cast<std::size_t>(config.paths), {});
  StepperOptions opts;
  opts.jacobian = true;
  out.times = simulate_paths(
      model, config, {x0}, times, opts, [&](long p, const PathRecord& rec) {
        auto& row = out.jacobians[static_cast<std::size_t>(p)];
        row.resize(static_cast<std::size_t>(rec.n_checkpoints));
        for (int k = 0; k < rec.n_checkpoints; ++k) row[k] = rec.jacobian(0, k);
      });
  Mat acc = Mat::Zero(model.dim, model.dim);
  for (const auto& row : out.jacobians) acc += row.back();
  out.mean_at_terminal = acc / static_cast<double>(config.paths);
  return out;
}

MomentReport moment_check(const CoefficientModel& model,
                          const SimulationConfig& config,
                          const WeightSpec& weights, const Vec& x0,
                          std::span<const double> times) {
  if (!weights.rho0) throw ConfigError("moment check requires rho0");
  MomentReport rep;
  rep.x0 = x0;
  const std::size_t nt = times.size();
  std::vector<std::vector<double>> vals(nt);
  for (auto& v : vals)
    v.assign(static_cast<std::size_t>(config.paths), kNaN);

  rep.times = simulate_paths(model, config, {x0}, times, StepperOptions{},
                             [&](long p, const PathRecord& rec) {
                               if (rec.diverged) return;
                               for (int k = 0; k < rec.n_checkpoints; ++k)
                                 vals[static_cast<std::size_t>(k)]
                                     [static_cast<std::size_t>(p)] =
                                         weights.rho0(rec.state(0, k));
                             });

  const double rho1x = weights.rho1 ? weights.rho1(x0) : 1.0;
  for (std::size_t k = 0; k < nt; ++k) {
    auto& v = vals[k];
    v.erase(std::remove_if(v.begin(), v.end(),
                           [](double a) { return std::isnan(a); }),
            v.end());
    const MeanSe ms = mean_se(v);
    const double bound = weights.eval_ell0(rep.times[k]) * rho1x;
    rep.value.push_back(ms.mean);
    rep.se.push_back(ms.se);
    rep.bound.push_back(bound);
    rep.ratio.push_back(ms.mean / bound);
    rep.max_ratio = std::max(rep.max_ratio, ms.mean / bound);
  }
  return rep;
}

LyapunovFunction quadratic_lyapunov(int dim) {
  LyapunovFunction V;
  V.form = "1+|x|^2";
  V.value = [](const Vec& x) { return 1.0 + x.squaredNorm(); };
  V.grad = [](const Vec& x, Vec& g) { g = 2.0 * x; };
  V.hess = [dim](const Vec&, Mat& h) {
    h = 2.0 * Mat::Identity(dim, dim);
  };
  return V;
}

LyapunovFunction exponential_lyapunov(int dim, double gamma, double q,
                                      double eps) {
  LyapunovFunction V;
  V.form = "exp(gamma (eps^2+|x|^2)^{q/2})";
  const double e2 = eps * eps;
  auto r2 = [e2](const Vec& x) { return e2 + x.squaredNorm(); };
  V.value = [=](const Vec& x) {
    return std::exp(gamma * std::pow(r2(x), q / 2.0));
  };
  V.grad = [=](const Vec& x, Vec& g) {
    const double s = r2(x);
    const double v = std::exp(gamma * std::pow(s, q / 2.0));
    g = (v * gamma * q * std::pow(s, q / 2.0 - 1.0)) * x;
  };
  V.hess = [=, n = dim](const Vec& x, Mat& h) {
    const double s = r2(x);
    const double pw = std::pow(s, q / 2.0 - 1.0);
    const double v = std::exp(gamma * std::pow(s, q / 2.0));
    const double c1 = v * gamma * q * pw;
    // d/dx of c1(x) x: c1 I + (c1' / |x|-direction) outer product
    const double c2 =
        v * gamma * q *
        (gamma * q * pw * pw + (q - 2.0) * std::pow(s, q / 2.0 - 2.0));
    h = c1 * Mat::Identity(n, n) + c2 * (x * x.transpose());
  };
  return V;
}

double generator_apply(const CoefficientModel& model,
                       const LyapunovFunction& V, const Vec& x) {
  Mat a, hess;
  Vec b(model.dim), grad(model.dim);
  model.eval_a(0.0, x, a);
  model.eval_drift(0.0, x, b);
  V.grad(x, grad);
  V.hess(x, hess);
  return (a * hess).trace() + b.dot(grad);
}

LyapunovFit lyapunov_fit(const CoefficientModel& model,
                         const LyapunovFunction& V,
                         const std::vector<Vec>& samples, double c0_cap) {
  if (samples.size() < 2)
    throw ArgumentError("lyapunov fit needs at least two sample points");
  LyapunovFit fit;
  fit.samples = static_cast<long>(samples.size());

  const std::size_t n = samples.size();
  Eigen::MatrixX2d A(n, 2);
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = V.value(samples[i]);
    if (!(v >= 1.0))
      throw ArgumentError("candidate function must satisfy V >= 1");
    A(static_cast<Eigen::Index>(i), 0) = v;
    A(static_cast<Eigen::Index>(i), 1) = 1.0;
    y[static_cast<Eigen::Index>(i)] = generator_apply(model, V, samples[i]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  fit.c0 = coef[0];
  fit.c1 = coef[1];
  // lift to a pointwise certificate
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = y[static_cast<Eigen::Index>(i)] -
                       (fit.c0 * A(static_cast<Eigen::Index>(i), 0) + fit.c1);
    worst = std::max(worst, gap);
  }
  fit.c1 += worst;
  double residual = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = y[static_cast<Eigen::Index>(i)] -
                       (fit.c0 * A(static_cast<Eigen::Index>(i), 0) + fit.c1);
    residual = std::max(residual, gap);
  }
  fit.max_residual = residual;
  fit.feasible = fit.c0 <= c0_cap;
  return fit;
}

}  // namespace semibound
