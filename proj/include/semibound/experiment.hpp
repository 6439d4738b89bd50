#pragma once

#include "semibound/catalog.hpp"
#include "semibound/report.hpp"
#include "semibound/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace semibound {

/// Raised on malformed experiment files; carries a location when known.
struct SpecParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  std::string task = "verify-short";
  std::string model = "ou";
  json model_params = json::object();
  std::string observable = "sin";
  double indicator_threshold = 0;
  std::vector<double> t_grid = {0.1, 1.0};
  std::vector<double> x_grid = {0.0};
  std::vector<double> decay_x_set = {1.0, 2.0};
  std::vector<int> n_list = {4, 8, 16, 32};
  long paths = 50000;
  double step = 5e-3;
  double delta = 1e-2;
  std::string scheme;  // "", "euler", "tamed_euler"
  std::uint64_t seed = 0;
  int workers = 0;
  double epsilon = 0.1;
  std::string estimator = "fd";
  std::optional<double> scaling_target;
  double scaling_tol = 0.05;
  bool assume_ergodic = false;
  bool dump_trajectories = false;
  std::string out_dir = ".";
  std::string format = "both";
  json raw = json::object();
};

ExperimentSpec parse_experiment_file(const std::string& path);
ExperimentSpec parse_experiment_json(const json& j);

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 checks failed
  json summary;
  std::vector<std::string> files_written;
};

/// Executes the spec's task and writes summary.json / CSV plot data into
/// out_dir.  Throws AssumptionError on gate failures (exit 3 at the CLI).
RunResult run_experiment(const ExperimentSpec& spec);

/// Catalog digest, stable across runs; `machine` yields the JSON form.
json catalog_summary();
std::string catalog_text();

CatalogModel resolve_model(const ExperimentSpec& spec);
Observable resolve_observable(const ExperimentSpec& spec);

}  // namespace semibound
