#include "semibound/experiment.hpp"

#include "semibound/parallel.hpp"

#include <filesystem>
#include <fstream>

namespace semibound {

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentSpec parse_experiment_json(const json& j) {
  if (!j.is_object()) throw SpecParseError("experiment spec must be an object");
  ExperimentSpec s;
  s.raw = j;
  try {
    read_field(j, "task", s.task);
    read_field(j, "model", s.model);
    if (j.contains("model_params")) s.model_params = j.at("model_params");
    read_field(j, "observable", s.observable);
    read_field(j, "indicator_threshold", s.indicator_threshold);
    read_field(j, "t_grid", s.t_grid);
    read_field(j, "x_grid", s.x_grid);
    read_field(j, "decay_x_set", s.decay_x_set);
    read_field(j, "n_list", s.n_list);
    read_field(j, "paths", s.paths);
    read_field(j, "step", s.step);
    read_field(j, "delta", s.delta);
    read_field(j, "scheme", s.scheme);
    read_field(j, "seed", s.seed);
    read_field(j, "workers", s.workers);
    read_field(j, "epsilon", s.epsilon);
    read_field(j, "estimator", s.estimator);
    if (j.contains("scaling_target"))
      s.scaling_target = j.at("scaling_target").get<double>();
    read_field(j, "scaling_tol", s.scaling_tol);
    read_field(j, "assume_ergodic", s.assume_ergodic);
    read_field(j, "dump_trajectories", s.dump_trajectories);
    read_field(j, "out_dir", s.out_dir);
    read_field(j, "format", s.format);
  } catch (const json::exception& e) {
    throw SpecParseError(std::string("invalid experiment field: ") + e.what());
  }
  if (s.t_grid.empty() || s.x_grid.empty())
    throw SpecParseError("t_grid and x_grid must be non-empty");
  static const std::vector<std::string> kTasks = {
      "bounds",     "simulate",    "estimate", "verify-short",
      "verify-long", "poisson",    "singular", "all"};
  if (std::find(kTasks.begin(), kTasks.end(), s.task) == kTasks.end())
    throw SpecParseError("unknown task: " + s.task);
  return s;
}

ExperimentSpec parse_experiment_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SpecParseError("cannot open experiment file: " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw SpecParseError("parse error in " + path + " at byte " +
                         std::to_string(e.byte) + ": " + e.what());
  }
  return parse_experiment_json(j);
}

CatalogModel resolve_model(const ExperimentSpec& spec) {
  const json& p = spec.model_params;
  if (spec.model == "heat") return make_heat(p.value("dim", 1));
  if (spec.model == "ou")
    return make_ou(p.value("dim", 1), p.value("kappa", 1.0));
  if (spec.model == "cubic") return make_cubic();
  if (spec.model == "geometric_drift")
    return make_geometric_drift(p.value("dim", 1));
  if (spec.model == "singular_v")
    return make_singular_v(p.value("alpha_prime", 0.6), p.value("n", 16));
  if (spec.model == "inline") {
    if (!p.contains("drift_poly"))
      throw SpecParseError("inline model needs drift_poly coefficients");
    const auto coeffs = p.at("drift_poly").get<std::vector<double>>();
    Vec c(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      c[static_cast<Eigen::Index>(i)] = coeffs[i];
    return make_poly_drift(c, p.value("sigma_const", 1.0));
  }
  throw SpecParseError("unknown model: " + spec.model);
}

Observable resolve_observable(const ExperimentSpec& spec) {
  if (spec.observable == "indicator")
    return make_indicator(spec.indicator_threshold);
  return make_observable(spec.observable);
}

namespace {

SimulationConfig sim_config(const ExperimentSpec& spec,
                            const CatalogModel& model) {
  SimulationConfig c;
  c.paths = spec.paths;
  c.step = spec.step;
  c.seed = spec.seed;
  c.workers = spec.workers;
  if (spec.scheme == "euler")
    c.scheme = Scheme::euler;
  else if (spec.scheme == "tamed_euler")
    c.scheme = Scheme::tamed_euler;
  else
    c.scheme = model.coeffs.drift_growth == DriftGrowth::superlinear
                   ? Scheme::tamed_euler
                   : Scheme::euler;
  return c;
}

Vec point1(double x, int dim) {
  Vec v = Vec::Zero(dim);
  v[0] = x;
  return v;
}

std::vector<Vec> grid_points(const std::vector<double>& xs, int dim) {
  std::vector<Vec> out;
  for (double x : xs) out.push_back(point1(x, dim));
  return out;
}

json run_bounds(const ExperimentSpec& spec, const CatalogModel& model,
                const Observable& phi, RunResult& result) {
  std::vector<BoundReport> rows;
  const double phi_norm = std::isfinite(phi.sup_norm) ? phi.sup_norm : 1.0;
  bool all_finite = true;
  for (double x : spec.x_grid)
    for (double t : spec.t_grid) {
      BoundInputs in = make_bound_inputs(model.coeffs, model.weights, t,
                                         point1(x, model.coeffs.dim), phi_norm);
      in.epsilon = spec.epsilon;
      rows.push_back(assemble_bound_report(in));
      const auto& r = rows.back();
      for (double v : {r.Gamma_t, r.GammaTilde_t, r.calG_t, r.calH, r.R0, r.R,
                       r.grad_rhs})
        if (!std::isfinite(v) || v < 0) all_finite = false;
    }
  json out = json::array();
  for (const auto& r : rows) out.push_back(to_json(r));
  if (spec.format != "json") {
    const auto path = spec.out_dir + "/bounds.csv";
    write_bounds_csv(rows, path);
    result.files_written.push_back(path);
  }
  if (!all_finite) result.exit_code = 1;
  return {{"rows", out}, {"pass", all_finite}};
}

json run_simulate(const ExperimentSpec& spec, const CatalogModel& model,
                  RunResult& result) {
  SimulationConfig cfg = sim_config(spec, model);
  cfg.horizon = spec.t_grid.back();
  const Vec x0 = point1(spec.x_grid.front(), model.coeffs.dim);
  const PathEnsemble ens = simulate(model.coeffs, cfg, x0, spec.t_grid);
  json out = {{"paths", ens.paths},
              {"dim", ens.dim},
              {"checkpoint_times", ens.checkpoint_times},
              {"diverged_fraction", ens.diverged_fraction}};
  const MomentReport rep =
      moment_check(model.coeffs, cfg, model.weights, x0, spec.t_grid);
  out["moment_check"] = to_json(rep);
  bool pass = true;
  for (std::size_t k = 0; k < rep.value.size(); ++k)
    if (rep.value[k] - 3 * rep.se[k] > rep.bound[k]) pass = false;
  out["pass"] = pass;
  if (!pass) result.exit_code = 1;
  if (spec.dump_trajectories) {
    const auto path = spec.out_dir + "/trajectories.bin";
    Mat flat(ens.paths, static_cast<Eigen::Index>(ens.checkpoint_times.size()) *
                            ens.dim);
    for (std::size_t k = 0; k < ens.checkpoint_states.size(); ++k)
      flat.middleCols(static_cast<Eigen::Index>(k) * ens.dim, ens.dim) =
          ens.checkpoint_states[k];
    write_columnar(flat, path,
                   {{"paths", ens.paths},
                    {"dim", ens.dim},
                    {"times", ens.checkpoint_times},
                    {"layout", "path-major (time, dim) blocks"}});
    result.files_written.push_back(path);
  }
  return out;
}

json run_estimate(const ExperimentSpec& spec, const CatalogModel& model,
                  const Observable& phi, RunResult& result) {
  SimulationConfig cfg = sim_config(spec, model);
  json rows = json::array();
  bool pass = true;
  for (double x : spec.x_grid) {
    const Vec x0 = point1(x, model.coeffs.dim);
    for (double t : spec.t_grid) {
      json row = {{"t", t}, {"x", x}};
      row["value"] =
          to_json(estimate_semigroup(model.coeffs, phi, t, x0, cfg));
      if (spec.estimator == "bismut")
        row["gradient"] =
            to_json(estimate_gradient_bismut(model.coeffs, phi, t, x0, cfg));
      else
        row["gradient"] = to_json(
            estimate_gradient_fd(model.coeffs, phi, t, x0, cfg, spec.delta));
      row["hessian"] = to_json(estimate_hessian_fd(
          model.coeffs, phi, t, x0, cfg, std::max(spec.delta, 0.05)));
      for (const char* key : {"value", "gradient", "hessian"})
        for (const auto& v : row[key]["value"])
          if (!v.is_number() || !std::isfinite(v.get<double>())) pass = false;
      rows.push_back(std::move(row));
    }
  }
  if (!pass) result.exit_code = 1;
  return {{"rows", rows}, {"pass", pass}};
}

json run_verify_short(const ExperimentSpec& spec, const CatalogModel& model,
                      const Observable& phi, RunResult& result) {
  VerifyConfig vc;
  vc.sim = sim_config(spec, model);
  vc.delta = spec.delta;
  vc.epsilon = spec.epsilon;
  vc.scaling_target = spec.scaling_target ? spec.scaling_target
                                          : std::optional<double>(-0.5);
  vc.scaling_tol = spec.scaling_tol;
  const VerificationReport rep = verify_bound(
      model.coeffs, model.weights, phi, spec.t_grid,
      grid_points(spec.x_grid, model.coeffs.dim), BoundKind::grad_short, vc);
  if (spec.format != "json") {
    const auto path = spec.out_dir + "/verify_short.csv";
    write_verification_csv(rep, path);
    result.files_written.push_back(path);
  }
  if (!(rep.pass_finite && rep.pass_no_uptrend && rep.pass_scaling))
    result.exit_code = 1;
  return to_json(rep);
}

json run_verify_long(const ExperimentSpec& spec, const CatalogModel& model,
                     const Observable& phi, RunResult& result) {
  // gate: dissipativity certificate and a fitted decay law
  ErgodicConfig ec;
  ec.sim = sim_config(spec, model);
  ec.sim.stream = 900;
  ec.dissipativity_override = spec.assume_ergodic;
  const EmpiricalMeasure mu = estimate_invariant(model, ec);
  const MeanSe mu_phi = mu.observable_mean(phi);

  std::vector<double> fit_grid;
  for (double t = 0.5; t <= 6.0; t += 0.5) fit_grid.push_back(t);
  SimulationConfig fit_sim = sim_config(spec, model);
  fit_sim.stream = 901;
  const DecayFit decay = fit_decay(
      model, phi, grid_points(spec.decay_x_set, model.coeffs.dim), fit_grid,
      model.ell1_family.value_or(DecayLaw::Family::exponential), mu_phi.mean,
      fit_sim);
  if (!decay.ok)
    throw AssumptionError("ergodic decay could not be fitted: " +
                          decay.message);

  CatalogModel with_decay = model;
  with_decay.weights.ell1 = decay.law();

  VerifyConfig vc;
  vc.sim = sim_config(spec, model);
  vc.delta = spec.delta;
  vc.epsilon = spec.epsilon;
  vc.scaling_target = spec.scaling_target ? spec.scaling_target
                                          : std::optional<double>(decay.gamma);
  vc.scaling_tol = spec.scaling_tol > 0 ? spec.scaling_tol : 0.1;
  vc.mu_hat = mu_phi.mean;
  const VerificationReport rep = verify_bound(
      with_decay.coeffs, with_decay.weights, phi, spec.t_grid,
      grid_points(spec.x_grid, model.coeffs.dim), BoundKind::grad_long, vc);
  if (spec.format != "json") {
    const auto path = spec.out_dir + "/verify_long.csv";
    write_verification_csv(rep, path);
    result.files_written.push_back(path);
  }
  if (!(rep.pass_finite && rep.pass_scaling)) result.exit_code = 1;
  json out = to_json(rep);
  out["mu_phi"] = mu_phi.mean;
  out["decay"] = to_json(decay);
  return out;
}

json run_poisson(const ExperimentSpec& spec, const CatalogModel& model,
                 const Observable& phi, RunResult& result) {
  PoissonConfig pc;
  pc.sim = sim_config(spec, model);
  pc.grad_delta = spec.delta;
  const auto points = grid_points(spec.x_grid, model.coeffs.dim);
  const PoissonSolution sol = solve_poisson(model, phi, points, pc);
  const ResidualReport res = residual_check(model, phi, points, pc);
  const PoissonVerifyReport ver =
      poisson_gradient_verify(model, phi, points, pc, spec.epsilon);
  const bool pass = res.max_relative <= 0.05 && ver.pass_finite;
  if (!pass) result.exit_code = 1;
  return {{"solution", to_json(sol)},
          {"residual", to_json(res)},
          {"gradient_verify", to_json(ver)},
          {"pass", pass}};
}

json run_singular(const ExperimentSpec& spec, const CatalogModel& model,
                  const Observable& phi, RunResult& result) {
  if (!model.singular)
    throw AssumptionError("singular task needs the singular_v model");
  const SingularDriftSpec& sd = *model.singular;
  SimulationConfig cfg = sim_config(spec, model);

  // mollified sup-norm growth across levels
  json mollify_rows = json::array();
  {
    std::vector<double> log_n, log_sup;
    for (int n : spec.n_list) {
      const MollifiedDrift b = mollify(sd, n);
      mollify_rows.push_back({{"n", n}, {"sup_bound", b.sup_bound}});
      log_n.push_back(std::log(static_cast<double>(n)));
      log_sup.push_back(std::log(b.sup_bound));
    }
    mollify_rows.push_back(
        {{"growth_fit", to_json(fit_line(log_n, log_sup))}});
  }

  SimulationConfig cauchy_cfg = cfg;
  cauchy_cfg.paths = std::min<long>(cfg.paths, 20000);
  const CauchyReport cauchy = drift_functional_cauchy(
      sd, spec.x_grid.front(), std::min(1.0, spec.t_grid.back()),
      spec.n_list, cauchy_cfg);

  std::vector<double> windows = {0.01, 0.03, 0.1, 0.32, 1.0};
  SimulationConfig kry_cfg = cfg;
  kry_cfg.stream = 910;
  const KrylovFit kry = krylov_fit(model.coeffs, make_observable("sin"), 2,
                                   windows, 0.0, kry_cfg);

  const UniformGradientReport uni = uniform_gradient_check(
      sd, phi, spec.t_grid, spec.x_grid, spec.n_list, cfg, spec.delta);
  if (spec.format != "json") {
    const auto path = spec.out_dir + "/uniform_gradient.csv";
    write_uniform_csv(uni, path);
    result.files_written.push_back(path);
  }
  const bool pass = uni.pass_flat && uni.pass_finite;
  if (!pass) result.exit_code = 1;
  return {{"mollify", mollify_rows},
          {"cauchy", to_json(cauchy)},
          {"krylov", to_json(kry)},
          {"uniform_gradient", to_json(uni)},
          {"pass", pass}};
}

}  // namespace

RunResult run_experiment(const ExperimentSpec& spec) {
  std::filesystem::create_directories(spec.out_dir);
  RunResult result;
  const CatalogModel model = resolve_model(spec);
  const Observable phi = resolve_observable(spec);

  json results = json::object();
  auto dispatch = [&](const std::string& task) {
    if (task == "bounds")
      results["bounds"] = run_bounds(spec, model, phi, result);
    else if (task == "simulate")
      results["simulate"] = run_simulate(spec, model, result);
    else if (task == "estimate")
      results["estimate"] = run_estimate(spec, model, phi, result);
    else if (task == "verify-short")
      results["verify_short"] = run_verify_short(spec, model, phi, result);
    else if (task == "verify-long")
      results["verify_long"] = run_verify_long(spec, model, phi, result);
    else if (task == "poisson")
      results["poisson"] = run_poisson(spec, model, phi, result);
    else if (task == "singular")
      results["singular"] = run_singular(spec, model, phi, result);
  };
  if (spec.task == "all") {
    dispatch("bounds");
    dispatch("simulate");
    dispatch("verify-short");
  } else {
    dispatch(spec.task);
  }

  result.summary = {{"task", spec.task},
                    {"model", spec.model},
                    {"observable", spec.observable},
                    {"seed", spec.seed},
                    {"constant_convention", kConstantConvention},
                    {"config", spec.raw},
                    {"results", results},
                    {"exit_code", result.exit_code}};
  if (spec.format != "csv") {
    const auto path = spec.out_dir + "/summary.json";
    write_text(path, result.summary.dump(2) + "\n");
    result.files_written.push_back(path);
  }
  return result;
}

json catalog_summary() {
  json out = json::array();
  for (const auto& name : catalog_names()) {
    const CatalogModel m = catalog_get(name);
    json entry = {{"name", name},
                  {"description", m.description},
                  {"dim", m.coeffs.dim},
                  {"alpha", m.coeffs.alpha},
                  {"p_b", m.coeffs.p_b == kInf ? json("inf")
                                               : json(m.coeffs.p_b)},
                  {"drift_growth",
                   m.coeffs.drift_growth == DriftGrowth::bounded ? "bounded"
                   : m.coeffs.drift_growth == DriftGrowth::linear
                       ? "linear"
                       : "superlinear"},
                  {"constant_ellipticity",
                   m.coeffs.lambda_fn && m.coeffs.Lambda_fn},
                  {"has_lyapunov", m.lyapunov.has_value()},
                  {"ll2_constant", m.coeffs.ll2_constant}};
    if (m.ell1_family)
      entry["ell1_family"] = DecayLaw::family_name(*m.ell1_family);
    if (m.singular) {
      entry["alpha_prime"] = m.singular->alpha_prime;
      entry["alpha_b"] = m.singular->declared_alpha_b();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::string catalog_text() {
  std::string s;
  for (const auto& entry : catalog_summary()) {
    s += entry.at("name").get<std::string>() + "\n  " +
         entry.at("description").get<std::string>() + "\n";
    s += "  alpha=" + entry.at("alpha").dump() +
         " p_b=" + entry.at("p_b").dump() +
         " growth=" + entry.at("drift_growth").get<std::string>();
    if (entry.contains("ell1_family"))
      s += " ell1=" + entry.at("ell1_family").get<std::string>();
    if (entry.contains("alpha_b")) s += " alpha_b=" + entry.at("alpha_b").dump();
    s += "\n";
  }
  return s;
}

}  // namespace semibound
