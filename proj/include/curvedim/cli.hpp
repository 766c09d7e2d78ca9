#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace curvedim {

/// Everything a subcommand needs. Defaults match the simulation study
/// (Daub4, levels 5..7, p = 5, B = 100, alpha = 0.05).
struct RunConfig {
  std::string command;     // estimate | aggregate | simulate | experiment | density
  std::string experiment;  // table1 | table2 | convergence
  std::string input;
  std::string output = "-";
  std::string format;  // empty: json, or csv for simulate/experiment

  std::string wavelet = "daub4";
  int j0 = 5;
  int jmax = 7;
  int max_lag = 5;

  std::string method = "ordinary";
  int bootstrap_replicates = 100;
  double alpha = 0.05;
  int d_max = 10;
  std::string threshold = "universal";  // or a fixed non-negative level
  bool literal_prose = false;

  int delta = 3;
  std::vector<double> weights{0.5, 0.3, 0.1};
  bool kstar = false;
  int components = 0;

  int d = 2;
  int n = 600;
  std::size_t grid = 256;
  double sigma_w2 = 1.5;
  bool noiseless = false;

  std::vector<int> dims;  // empty: experiment default
  std::vector<int> sizes;
  std::vector<std::string> methods;
  int replicates = 0;  // 0: experiment default

  std::string input_kind = "density";  // density | sqrt

  std::uint64_t seed = 0;
  int threads = 1;  // not echoed: results do not depend on it
  bool timestamp = true;
};

/// Flags that shape the result of `cfg.command`, with resolved defaults.
/// The output path and thread count are left out so that reports of equal
/// runs are byte-identical.
[[nodiscard]] nlohmann::json config_echo(const RunConfig& cfg);

/// Runs one subcommand. Returns 0 on success, 2 on invalid input or
/// configuration, 3 on numerical failure; diagnostics go to `diag`.
int run(const RunConfig& cfg, std::ostream& diag);

/// Parses command-line arguments (without the program name) and runs.
/// The default seed is taken from CURVEDIM_SEED when set.
int run_cli(const std::vector<std::string>& args, std::ostream& diag);

}  // namespace curvedim
