#include "semibound/report.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace semibound {

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string csv_num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const LineFit& f) {
  return {{"slope", finite_or_null(f.slope)},
          {"intercept", finite_or_null(f.intercept)},
          {"slope_se", finite_or_null(f.slope_se)},
          {"residual", finite_or_null(f.residual)},
          {"count", f.count}};
}

json to_json(const LocalNormReport& r) {
  return {{"center", to_json(r.center)},
          {"alpha", r.alpha},
          {"holder_a", r.holder_a},
          {"lp_b", r.lp_b},
          {"holder_b", r.holder_b},
          {"sample_count", r.sample_count},
          {"method", r.method == NormMethod::closed_form   ? "closed_form"
                     : r.method == NormMethod::pair_sampling ? "pair_sampling"
                                                             : "quadrature"},
          {"unbounded_above_budget", r.unbounded_above_budget}};
}

json to_json(const BoundReport& r) {
  json j = {{"t", r.t},
            {"x", to_json(r.x)},
            {"Gamma_t", r.Gamma_t},
            {"GammaTilde_t", r.GammaTilde_t},
            {"calG_t", r.calG_t},
            {"calH", r.calH},
            {"R0", r.R0},
            {"R", r.R},
            {"grad_rhs", r.grad_rhs},
            {"hess_rhs", r.hess_rhs},
            {"constant_convention", r.constant_convention}};
  if (r.longtime_grad_rhs) j["longtime_grad_rhs"] = *r.longtime_grad_rhs;
  if (r.longtime_hess_rhs) j["longtime_hess_rhs"] = *r.longtime_hess_rhs;
  if (r.poisson_grad_rhs) j["poisson_grad_rhs"] = *r.poisson_grad_rhs;
  if (r.schauder_rhs) j["schauder_rhs"] = *r.schauder_rhs;
  return j;
}

json to_json(const DerivativeEstimate& e) {
  json value = json::array(), se = json::array(), bias = json::array();
  for (Eigen::Index i = 0; i < e.value.rows(); ++i)
    for (Eigen::Index j = 0; j < e.value.cols(); ++j) {
      value.push_back(e.value(i, j));
      se.push_back(e.se(i, j));
      if (e.bias.size() == e.value.size()) bias.push_back(e.bias(i, j));
    }
  return {{"order", e.order},
          {"rows", e.value.rows()},
          {"cols", e.value.cols()},
          {"value", value},
          {"std_error", se},
          {"bias_estimate", bias},
          {"bump", e.bump},
          {"estimator", e.estimator == EstimatorKind::fd_crn ? "fd_crn"
                                                             : "bismut"},
          {"paths", e.paths},
          {"diverged_fraction", e.diverged_fraction},
          {"noise_floor_warning", e.noise_floor_warning}};
}

json to_json(const VerificationReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"t", c.t},
                     {"x", to_json(c.x)},
                     {"measured", c.measured},
                     {"se", c.se},
                     {"rhs", c.rhs},
                     {"ratio", c.ratio}});
  json j = {{"which", bound_kind_name(r.which)},
            {"cells", cells},
            {"time_scaling", to_json(r.time_scaling)},
            {"decay_rate", to_json(r.decay_rate)},
            {"rhs_tracking", to_json(r.rhs_tracking)},
            {"ratio_trend", to_json(r.ratio_trend)},
            {"ratio_sup", r.ratio_sup},
            {"pass_finite", r.pass_finite},
            {"pass_no_uptrend", r.pass_no_uptrend},
            {"pass_scaling", r.pass_scaling},
            {"scaling_tol", r.scaling_tol},
            {"constant_convention", kConstantConvention}};
  if (r.scaling_target) j["scaling_target"] = *r.scaling_target;
  return j;
}

json to_json(const MomentReport& r) {
  return {{"x0", to_json(r.x0)},
          {"times", r.times},
          {"value", r.value},
          {"se", r.se},
          {"bound", r.bound},
          {"ratio", r.ratio},
          {"max_ratio", r.max_ratio}};
}

json to_json(const LyapunovFit& f) {
  return {{"c0", f.c0},
          {"c1", f.c1},
          {"feasible", f.feasible},
          {"max_residual", f.max_residual},
          {"samples", f.samples}};
}

json to_json(const DecayFit& f) {
  return {{"family", DecayLaw::family_name(f.family)},
          {"gamma", f.gamma},
          {"gamma_ci", f.gamma_ci},
          {"scale", f.scale},
          {"residual", f.residual},
          {"window", {f.window_lo, f.window_hi}},
          {"points_used", f.points_used},
          {"ok", f.ok},
          {"message", f.message}};
}

json to_json(const PoissonSolution& s) {
  json pts = json::array();
  for (const auto& p : s.points)
    pts.push_back({{"x", to_json(p.x)},
                   {"u", p.u},
                   {"mc_se", p.se},
                   {"grad", p.grad},
                   {"grad_se", p.grad_se},
                   {"quad_err", p.quad_err},
                   {"tail_err", p.tail_err},
                   {"total_err", p.total_err()}});
  return {{"points", pts},
          {"mu_f", s.mu_f},
          {"mu_f_se", s.mu_f_se},
          {"T_max", s.T_max},
          {"decay", to_json(s.decay)},
          {"time_grid_nodes", s.time_grid.size()}};
}

json to_json(const ResidualReport& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"x", to_json(p.x)},
                   {"residual", p.residual},
                   {"se", p.se},
                   {"relative", p.relative},
                   {"inconclusive", p.inconclusive}});
  return {{"points", pts},
          {"sup_f", r.sup_f},
          {"max_relative", r.max_relative}};
}

json to_json(const PoissonVerifyReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"x", to_json(c.x)},
                     {"measured", c.measured},
                     {"se", c.se},
                     {"rhs", c.rhs},
                     {"ratio", c.ratio}});
  return {{"cells", cells},
          {"ratio_sup", r.ratio_sup},
          {"pass_finite", r.pass_finite},
          {"constant_convention", kConstantConvention}};
}

json to_json(const CauchyReport& r) {
  return {{"n", r.n_values},
          {"distance", r.distance},
          {"se", r.se},
          {"log_slope", to_json(r.log_slope)},
          {"decreasing", r.decreasing},
          {"conclusive", r.conclusive}};
}

json to_json(const KrylovFit& f) {
  return {{"m", f.m},
          {"window", f.window},
          {"lm_norm", f.lm_norm},
          {"exponent", f.exponent},
          {"theta", f.theta},
          {"exponent_ci", f.exponent_ci},
          {"residual", f.residual},
          {"f", f.f_name}};
}

json to_json(const UniformGradientReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells)
    cells.push_back({{"n", c.n},
                     {"t", c.t},
                     {"x", c.x},
                     {"measured", c.measured},
                     {"se", c.se},
                     {"rhs", c.rhs},
                     {"ratio", c.ratio}});
  return {{"cells", cells},
          {"ratio_vs_log_n", to_json(r.ratio_vs_log_n)},
          {"ratio_sup", r.ratio_sup},
          {"pass_flat", r.pass_flat},
          {"pass_finite", r.pass_finite},
          {"flat_tol", r.flat_tol}};
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << content;
}

void write_verification_csv(const VerificationReport& r,
                            const std::string& path) {
  std::ostringstream os;
  os << "t,x,measured,se,rhs,ratio\n";
  for (const auto& c : r.cells)
    os << csv_num(c.t) << ',' << csv_num(c.x[0]) << ',' << csv_num(c.measured)
       << ',' << csv_num(c.se) << ',' << csv_num(c.rhs) << ','
       << csv_num(c.ratio) << '\n';
  write_text(path, os.str());
}

void write_uniform_csv(const UniformGradientReport& r,
                       const std::string& path) {
  std::ostringstream os;
  os << "n,t,x,measured,rhs,ratio\n";
  for (const auto& c : r.cells)
    os << c.n << ',' << csv_num(c.t) << ',' << csv_num(c.x) << ','
       << csv_num(c.measured) << ',' << csv_num(c.rhs) << ','
       << csv_num(c.ratio) << '\n';
  write_text(path, os.str());
}

void write_bounds_csv(const std::vector<BoundReport>& rows,
                      const std::string& path) {
  std::ostringstream os;
  os << "t,x,Gamma_t,GammaTilde_t,calG_t,calH,R0,R,grad_rhs,hess_rhs\n";
  for (const auto& r : rows)
    os << csv_num(r.t) << ',' << csv_num(r.x[0]) << ',' << csv_num(r.Gamma_t)
       << ',' << csv_num(r.GammaTilde_t) << ',' << csv_num(r.calG_t) << ','
       << csv_num(r.calH) << ',' << csv_num(r.R0) << ',' << csv_num(r.R) << ','
       << csv_num(r.grad_rhs) << ',' << csv_num(r.hess_rhs) << '\n';
  write_text(path, os.str());
}

void write_columnar(const Mat& rows_by_cols, const std::string& path,
                    const json& sidecar_extra) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  // row-major little-endian f64
  for (Eigen::Index i = 0; i < rows_by_cols.rows(); ++i)
    for (Eigen::Index j = 0; j < rows_by_cols.cols(); ++j) {
      const double v = rows_by_cols(i, j);
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      unsigned char buf[8];
      for (int b = 0; b < 8; ++b)
        buf[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
      os.write(reinterpret_cast<const char*>(buf), 8);
    }
  os.close();
  json sidecar = {{"dtype", "<f8"},
                  {"layout", "row-major"},
                  {"rows", rows_by_cols.rows()},
                  {"cols", rows_by_cols.cols()}};
  if (!sidecar_extra.is_null())
    for (auto it = sidecar_extra.begin(); it != sidecar_extra.end(); ++it)
      sidecar[it.key()] = it.value();
  write_text(path + ".json", sidecar.dump(2) + "\n");
}

}  // namespace semibound
