// Command-line runner for the verification suite.
//
// Exit codes: 0 all checks passed, 1 checks failed, 2 spec parse error,
// 3 assumption gate failure.

#include "semibound/experiment.hpp"
#include "semibound/parallel.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>

using namespace semibound;

namespace {

int run_task(const std::string& task, const std::string& spec_path,
             std::uint64_t seed, bool seed_set, int workers,
             const std::string& out_dir, const std::string& format) {
  ExperimentSpec spec;
  try {
    spec = parse_experiment_file(spec_path);
  } catch (const SpecParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  }
  if (!task.empty() && task != "run") spec.task = task;
  if (seed_set) spec.seed = seed;
  if (workers > 0) spec.workers = workers;
  if (!out_dir.empty()) spec.out_dir = out_dir;
  if (!format.empty()) spec.format = format;

  try {
    const auto started = std::chrono::system_clock::now();
    const RunResult r = run_experiment(spec);
    // volatile run facts live next to the reproducible summary
    const auto ended = std::chrono::system_clock::now();
    json meta = {{"workers", spec.workers > 0 ? spec.workers
                                              : default_workers()},
                 {"started_unix_ms",
                  std::chrono::duration_cast<std::chrono::milliseconds>(
                      started.time_since_epoch())
                      .count()},
                 {"elapsed_ms",
                  std::chrono::duration_cast<std::chrono::milliseconds>(
                      ended - started)
                      .count()}};
    write_text(spec.out_dir + "/metadata.json", meta.dump(2) + "\n");
    std::cout << r.summary.dump(2) << "\n";
    return r.exit_code;
  } catch (const SpecParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const AssumptionError& e) {
    std::cerr << "assumption gate: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusion semigroup derivative-bound verification suite"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--spec", spec_path, "experiment spec file (JSON)")
        ->required();
    cmd->add_option("--seed", seed, "override the spec seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--workers", workers, "worker threads (0 = auto)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--format", format, "json, csv, or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
  };

  const std::vector<std::string> tasks = {
      "run",        "bounds",      "simulate", "estimate",
      "verify-short", "verify-long", "poisson",  "singular"};
  for (const auto& t : tasks) {
    auto* cmd = app.add_subcommand(
        t, t == "run" ? "run the task named in the spec file"
                      : "run the '" + t + "' task from the spec file");
    add_common(cmd);
    cmd->callback([&, t]() {
      std::exit(run_task(t, spec_path, seed, seed_set, workers, out_dir,
                         format));
    });
  }

  bool machine = false;
  auto* cat = app.add_subcommand("catalog", "list models and certificates");
  cat->add_flag("--json", machine, "machine-readable output");
  cat->callback([&]() {
    if (machine)
      std::cout << catalog_summary().dump(2) << "\n";
    else
      std::cout << catalog_text();
    std::exit(0);
  });

  std::string summary_path;
  auto* rep = app.add_subcommand("report", "digest a summary.json");
  rep->add_option("--summary", summary_path, "summary file")->required();
  rep->callback([&]() {
    std::ifstream is(summary_path);
    if (!is) {
      std::cerr << "cannot open " << summary_path << "\n";
      std::exit(2);
    }
    json j;
    try {
      j = json::parse(is);
    } catch (const json::parse_error& e) {
      std::cerr << "parse error: " << e.what() << "\n";
      std::exit(2);
    }
    std::cout << "task: " << j.value("task", "?") << "\n"
              << "model: " << j.value("model", "?") << "\n"
              << "exit_code: " << j.value("exit_code", -1) << "\n"
              << "convention: " << j.value("constant_convention", "?") << "\n";
    std::exit(0);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}
