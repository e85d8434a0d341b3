#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rough {

// Flat experiment configuration shared by the CLI subcommands. Defaults are
// the documented ones: alpha 1.5, N 64, seed 0.
struct ExperimentConfig {
  // global
  double alpha = 1.5;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int workers = 1;
  int verbosity = 1;

  // field
  double field_t = 1.0;
  double field_box = 1.0;
  std::vector<int> field_ns{16, 32, 64, 128};
  std::size_t field_replicas = 500;

  // solve
  int solve_n = 64;
  double solve_box = 1.0;
  double solve_dt = 1e-3;
  double solve_t_end = 0.1;
  std::string solve_sigma = "tanh:1";
  bool solve_coupled = false;
  std::vector<double> solve_snapshots;
  std::size_t solve_replicas = 1;

  // moments
  int moments_k = 2;
  std::vector<double> moments_t_grid{0.05, 0.1, 0.15};
  std::string moments_method = "feynman-kac";  // or "solver"
  std::size_t moments_replicas = 1000;

  // oscillation
  double osc_t = 0.05;
  std::vector<double> osc_deltas{0.25, 0.0625};
  std::size_t osc_replicas = 50;
  std::size_t osc_budget = 4096;

  // verify
  std::string verify_only;
  double verify_replica_scale = 1.0;

  // every problem found, not just the first
  std::vector<std::string> validate() const;

  std::string echo() const;  // flattened key=value lines for the manifest
};

struct ParseOutcome {
  ExperimentConfig config;
  std::vector<std::string> errors;  // unknown keys, bad values, ...
  bool ok() const { return errors.empty(); }
};

// Sectioned key = value text ([kernel], [field], [solve], [moments],
// [oscillation], [verify]; unsectioned lines are global). '#' starts a
// comment. Unknown sections or keys are collected as errors. Validation
// errors are appended so the caller sees everything at once.
ParseOutcome parse_config_text(const std::string& text);
ParseOutcome parse_config_file(const std::string& path);

// helpers shared with the CLI
std::vector<double> parse_double_list(const std::string& csv);
std::vector<int> parse_int_list(const std::string& csv);

}  // namespace rough
