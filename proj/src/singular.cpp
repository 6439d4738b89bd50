#include "semibound/singular.hpp"

#include "semibound/rng.hpp"
#include "semibound/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace semibound {

namespace {

double raw_bump(double x) {
  const double s = 1.0 - x * x;
  return s > 0 ? std::exp(-1.0 / s) : 0.0;
}

double raw_bump_deriv(double x) {
  const double s = 1.0 - x * x;
  if (s <= 0) return 0.0;
  return raw_bump(x) * (-2.0 * x / (s * s));
}

// composite Simpson on [-1, 1]
template <typename F>
double simpson_11(const F& f, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = 2.0 / intervals;
  double acc = f(-1.0) + f(1.0);
  for (int i = 1; i < intervals; ++i)
    acc += f(-1.0 + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

double bump_mass() {
  static const double mass = simpson_11(raw_bump, 4096);
  return mass;
}

}  // namespace

double mollifier_bump(double x) { return raw_bump(x) / bump_mass(); }

double mollifier_transform(double xi) {
  xi = std::abs(xi);
  if (xi > 2000.0) return 0.0;  // below 1e-30 of the mass
  static std::map<double, double> cache;
  static std::mutex mtx;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(xi);
    if (it != cache.end()) return it->second;
  }
  const int intervals = std::max(4096, static_cast<int>(64.0 * xi));
  const double v = simpson_11(
      [xi](double x) { return raw_bump(x) * std::cos(xi * x); }, intervals) /
      bump_mass();
  std::lock_guard<std::mutex> lock(mtx);
  cache[xi] = v;
  return v;
}

double SingularDriftSpec::declared_alpha_b() const {
  // clamp into the admissible singular window
  return std::min(alpha_prime - 1.0, -0.5);
}

double SingularDriftSpec::phase(int j) const {
  return 2.0 * M_PI *
         rng_uniform(phase_seed, 0, static_cast<std::uint64_t>(j), 0, 0);
}

double SingularDriftSpec::potential(double x) const {
  if (custom_potential) return custom_potential(x);
  double acc = 0;
  for (int j = 0; j <= levels; ++j)
    acc += std::pow(base, -j * alpha_prime) *
           std::cos(std::pow(base, j) * x + phase(j));
  return acc;
}

MollifiedDrift mollify(const SingularDriftSpec& spec, int n) {
  if (n < 1) throw ArgumentError("mollification level must be >= 1");
  MollifiedDrift out;
  out.n = n;

  if (spec.custom_potential) {
    // derivative moved onto the mollifier: (V * bump_n')(x), y = u/n
    const auto V = spec.custom_potential;
    const double mass = bump_mass();
    out.eval = [V, n, mass](double x) {
      const int intervals = 2048;
      const double h = 2.0 / intervals;
      double acc = 0;
      for (int i = 0; i <= intervals; ++i) {
        const double u = -1.0 + i * h;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * V(x - u / n) * raw_bump_deriv(u);
      }
      return acc * h / 3.0 * n / mass;
    };
    double sup = 0;
    for (int i = 0; i <= 2048; ++i)
      sup = std::max(sup, std::abs(out.eval(-10.0 + 20.0 * i / 2048.0)));
    out.sup_bound = sup;
    return out;
  }

  // lacunary family: exact mode sum with transform-damped amplitudes
  struct Mode {
    double freq;
    double amp;  // signed amplitude of -sin(freq x + phase)
    double phase;
  };
  auto modes = std::make_shared<std::vector<Mode>>();
  double sup = 0;
  for (int j = 0; j <= spec.levels; ++j) {
    const double freq = std::pow(spec.base, j);
    const double damp = mollifier_transform(freq / n);
    const double amp = std::pow(spec.base, j * (1.0 - spec.alpha_prime)) * damp;
    if (amp == 0.0) continue;
    modes->push_back({freq, amp, spec.phase(j)});
    sup += std::abs(amp);
  }
  out.sup_bound = sup;
  out.eval = [modes](double x) {
    double acc = 0;
    for (const auto& m : *modes) acc -= m.amp * std::sin(m.freq * x + m.phase);
    return acc;
  };
  return out;
}

CoefficientModel mollified_model(const SingularDriftSpec& spec, int n,
                                 int table_size) {
  MollifiedDrift b1 = mollify(spec, n);
  const bool periodic =
      !spec.custom_potential && spec.base == std::floor(spec.base);

  std::function<double(double)> b1_eval = b1.eval;
  if (periodic && table_size > 0) {
    // 2 pi periodic mode sum: tabulate once, interpolate in the hot loop
    auto table = std::make_shared<std::vector<double>>(
        static_cast<std::size_t>(table_size) + 1);
    const double period = 2.0 * M_PI;
    for (int i = 0; i <= table_size; ++i)
      (*table)[static_cast<std::size_t>(i)] =
          b1.eval(period * i / table_size);
    const double inv_dx = table_size / period;
    b1_eval = [table, period, inv_dx](double x) {
      double r = std::fmod(x, period);
      if (r < 0) r += period;
      const double s = r * inv_dx;
      const auto i = static_cast<std::size_t>(s);
      const double w = s - static_cast<double>(i);
      return (1.0 - w) * (*table)[i] + w * (*table)[i + 1];
    };
  }

  CoefficientModel m;
  m.name = "singular_v[n=" + std::to_string(n) + "]";
  m.dim = 1;
  const auto b2 = spec.b2;
  m.drift = [b1_eval, b2](double, const Vec& x, Vec& out) {
    out[0] = b1_eval(x[0]) + (b2 ? b2(x[0]) : 0.0);
  };
  m.sigma = [](double, const Vec&, Mat& out) { out(0, 0) = 1.0; };
  m.constant_sigma = true;
  m.alpha = 1.0;
  m.p_b = spec.p_b;
  m.q_b = spec.q_b;
  m.lambda_fn = [](const Vec&) { return 1.0; };
  m.Lambda_fn = [](const Vec&) { return 1.0; };
  m.holder_a_fn = [](const Vec&) { return 0.0; };
  m.ll2_constant = 1.0;
  m.drift_growth =
      spec.b2_c1 > 0 ? DriftGrowth::linear : DriftGrowth::bounded;
  const double sup = b1.sup_bound, c0 = spec.b2_c0, c1 = spec.b2_c1;
  m.lp_b_fn = [sup, c0, c1](const Vec& x) {
    return sup + c0 + c1 * (std::abs(x[0]) + 1.0);
  };
  return m;
}

CauchyReport drift_functional_cauchy(const SingularDriftSpec& spec, double x0,
                                     double t, std::span<const int> n_list,
                                     const SimulationConfig& config) {
  if (n_list.size() < 2)
    throw ArgumentError("cauchy check needs at least two mollification levels");
  CauchyReport rep;

  // per level: the drift functional on that level's own dynamics, shared noise
  std::vector<std::vector<double>> A(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const int n = n_list[i];
    const CoefficientModel model = mollified_model(spec, n);
    const MollifiedDrift b1 = mollify(spec, n);
    SimulationConfig sim = config;
    sim.horizon = t;
    sim.scheme = spec.b2_c1 > 0 ? Scheme::tamed_euler : config.scheme;
    StepperOptions opts;
    opts.integrand = [ev = b1.eval](const Vec& x) { return ev(x[0]); };
    A[i].assign(static_cast<std::size_t>(sim.paths), kNaN);
    Vec start(1);
    start[0] = x0;
    const std::vector<double> ts = {t};
    simulate_paths(model, sim, {start}, ts, opts,
                   [&](long p, const PathRecord& rec) {
                     if (rec.diverged) return;
                     A[i][static_cast<std::size_t>(p)] = rec.integral(0, 0);
                   });
  }

  std::vector<double> log_n, log_d;
  bool decreasing = true;
  double prev = kInf;
  for (std::size_t i = 0; i + 1 < n_list.size(); ++i) {
    std::vector<double> sq;
    sq.reserve(A[i].size());
    for (std::size_t p = 0; p < A[i].size(); ++p) {
      if (std::isnan(A[i][p]) || std::isnan(A[i + 1][p])) continue;
      const double d = A[i][p] - A[i + 1][p];
      sq.push_back(d * d);
    }
    const MeanSe ms = mean_se(sq);
    const double l2 = std::sqrt(std::max(ms.mean, 0.0));
    rep.n_values.push_back(n_list[i]);
    rep.distance.push_back(l2);
    rep.se.push_back(l2 > 0 ? ms.se / (2 * l2) : std::sqrt(ms.se));
    if (l2 > 0) {
      log_n.push_back(std::log(static_cast<double>(n_list[i])));
      log_d.push_back(std::log(l2));
    }
    if (l2 >= prev) decreasing = false;
    prev = l2;
  }
  rep.log_slope = fit_line(log_n, log_d);
  rep.decreasing = decreasing;
  // conclusive when the trend clears the noise
  double top = rep.distance.empty() ? 0 : rep.distance.front();
  double bottom = rep.distance.empty() ? 0 : rep.distance.back();
  double noise = 0;
  for (std::size_t i = 0; i < rep.se.size(); ++i) noise = std::max(noise, rep.se[i]);
  rep.conclusive = top - bottom > 5 * noise || (top == 0 && bottom == 0);
  return rep;
}

KrylovFit krylov_fit(const CoefficientModel& model, const Observable& f,
                     int m, std::span<const double> windows, double t_start,
                     const SimulationConfig& config) {
  if (m != 2 && m != 4) throw ArgumentError("moment order must be 2 or 4");
  if (windows.size() < 4) throw ArgumentError("need at least 4 windows");
  {
    const auto [lo, hi] = std::minmax_element(windows.begin(), windows.end());
    if (!(*lo > 0) || *hi / *lo < 31.0)
      throw ArgumentError("windows must span at least 1.5 decades");
  }
  KrylovFit fit;
  fit.m = m;
  fit.f_name = f.name;

  const double w_max = *std::max_element(windows.begin(), windows.end());
  SimulationConfig sim = config;
  sim.horizon = t_start + w_max;
  StepperOptions opts;
  opts.integrand = [&f](const Vec& x) { return f(x); };

  std::vector<double> ck = {t_start};
  for (double w : windows) ck.push_back(t_start + w);

  std::vector<std::vector<double>> integrals(
      ck.size(), std::vector<double>(static_cast<std::size_t>(sim.paths), kNaN));
  Vec start = Vec::Zero(model.dim);
  const auto snapped =
      simulate_paths(model, sim, {start}, ck, opts,
                     [&](long p, const PathRecord& rec) {
                       if (rec.diverged) return;
                       for (std::size_t k = 0; k < ck.size(); ++k)
                         integrals[k][static_cast<std::size_t>(p)] =
                             rec.integral(0, static_cast<int>(k));
                     });

  std::vector<double> log_w, log_norm;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    std::vector<double> powm;
    powm.reserve(integrals[0].size());
    for (std::size_t p = 0; p < integrals[0].size(); ++p) {
      if (std::isnan(integrals[0][p]) || std::isnan(integrals[i + 1][p]))
        continue;
      const double inc = integrals[i + 1][p] - integrals[0][p];
      powm.push_back(m == 2 ? inc * inc : inc * inc * inc * inc);
    }
    const double norm =
        std::pow(mean_se(powm).mean, 1.0 / static_cast<double>(m));
    const double w_snapped = snapped[i + 1] - snapped[0];
    fit.window.push_back(w_snapped);
    fit.lm_norm.push_back(norm);
    if (norm > 0 && w_snapped > 0) {
      log_w.push_back(std::log(w_snapped));
      log_norm.push_back(std::log(norm));
    }
  }
  if (log_w.size() < 4)
    throw ArgumentError("window norms vanish; nothing to fit");
  const LineFit lf = fit_line(log_w, log_norm);
  fit.exponent = lf.slope;
  fit.theta = 2.0 * lf.slope - 1.0;
  fit.exponent_ci = 2.0 * lf.slope_se;
  fit.residual = lf.residual;
  return fit;
}

UniformGradientReport uniform_gradient_check(const SingularDriftSpec& spec,
                                             const Observable& phi,
                                             std::span<const double> t_grid,
                                             std::span<const double> x_grid,
                                             std::span<const int> n_list,
                                             const SimulationConfig& config,
                                             double delta, double flat_tol) {
  if (!std::isfinite(phi.sup_norm))
    throw ArgumentError("uniform gradient check needs a bounded observable");
  UniformGradientReport rep;
  rep.flat_tol = flat_tol;

  std::vector<double> log_n, mean_ratio;
  const std::vector<double> ts(t_grid.begin(), t_grid.end());
  for (int n : n_list) {
    const CoefficientModel model = mollified_model(spec, n);
    SimulationConfig sim = config;
    sim.scheme = Scheme::tamed_euler;
    // resolve the finest oscillation the mollified drift carries
    sim.step = std::min(config.step, 0.25 / (static_cast<double>(n) * n));
    double acc = 0;
    long count = 0;
    for (double x : x_grid) {
      Vec x0(1);
      x0[0] = x;
      const auto est =
          estimate_gradient_series(model, phi, ts, x0, sim, delta);
      for (std::size_t k = 0; k < ts.size(); ++k) {
        UniformGradientCell cell;
        cell.n = n;
        cell.t = ts[k];
        cell.x = x;
        cell.measured = std::abs(est[k].value(0, 0));
        cell.se = est[k].se(0, 0);
        cell.rhs =
            (1.0 + std::abs(x) + 1.0 / std::sqrt(ts[k])) * phi.sup_norm;
        cell.ratio = cell.measured / cell.rhs;
        acc += cell.ratio;
        ++count;
        rep.ratio_sup = std::max(rep.ratio_sup, cell.ratio);
        rep.cells.push_back(std::move(cell));
      }
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    mean_ratio.push_back(acc / static_cast<double>(count));
  }
  rep.ratio_vs_log_n = fit_line(log_n, mean_ratio);
  rep.pass_flat = std::abs(rep.ratio_vs_log_n.slope) <= flat_tol;
  rep.pass_finite = std::isfinite(rep.ratio_sup);
  rep.pass_finite = rep.pass_finite && rep.ratio_sup > 0;
  for (const auto& c : rep.cells)
    if (!std::isfinite(c.ratio)) rep.pass_finite = false;
  return rep;
}

}  // namespace semibound
