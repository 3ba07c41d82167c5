#pragma once

// Command-line front end: configuration ingestion (flags over JSON config file
// over defaults), orchestration of the computational modules, sweep mode, and
// report/CSV emission.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mch::cli {

struct RunConfig {
  std::string command;  // wave | functionals | spectrum | vk | evolve | sweep | verify-all

  double c = 1.0;
  double k = 0.4;

  // grid overrides (unset <= 0 means module default)
  double dx = 0.0;
  double L = 0.0;
  double tail_tol = 0.0;

  // sweep
  double k_min = 0.0;  // 0 = default margin from the window ends
  double k_max = 0.0;
  int k_count = 21;

  // evolution
  long N = 4096;
  double L_dom = 0.0;  // 0 = 4 * default profile half-length
  double dt_cap = 0.01;
  double cfl = 0.5;
  double t_end = 10.0;
  double sample_interval = 0.1;
  std::string perturbation = "none";
  double eps = 1e-3;
  double width = 1.0;
  std::uint64_t seed = 1;

  std::string out_dir;  // default: $MCHWAVE_OUT_ROOT or ./out
  bool force = false;
};

/// Merges CLI flags over config-file values over defaults; rejects unknown
/// keys and inadmissible parameters (validation_error).
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes the configured command. Returns the process exit code:
/// 0 success, 2 usage/validation, 3 numerical failure, 4 acceptance failure.
int run_command(const RunConfig& cfg);

/// parse + run with exit-code mapping for exceptions.
int run(int argc, char** argv);

}  // namespace mch::cli
