#pragma once

// Command-line front end. Exit codes: 0 success, 1 unexpected failure,
// otherwise exit_code(kind) of the module error (ConfigInvalid = 2).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace widom::cli {

struct ExperimentConfig {
  std::string command;
  std::string symbol_path;
  std::string input_path;
  std::string output_path;  // empty: standard output
  std::string report_path;
  std::string fit_path;
  std::string n_grid = "8:512:geometric";
  std::string f_spec = "square";
  int p = 1;
  int m = 0;
  int n_min = 0;
  int n_max = 32;
  int step = 1;
  int nodes = 128;
  double margin = 0.5;
  bool left = false;
  std::optional<double> gamma;
  std::string column = "residual_abs";
  // gen-symbol
  std::optional<double> zygmund;
  std::optional<double> rational;
  std::optional<double> block;
  int levels = 8;
  unsigned long long seed = 0;
};

/// "min:max:linear[:step]" or "min:max:geometric[:factor]". Throws ConfigInvalid.
std::vector<int> parse_n_grid(const std::string& spec);

/// Throws ConfigInvalid on inconsistent settings (e.g. an output path equal to an input).
void validate(const ExperimentConfig& config);

/// Executes a validated configuration, writing artifacts to disk or `out`.
void execute(const ExperimentConfig& config, std::ostream& out);

/// Parses argv, runs, and reports errors on `err` as "error: <Kind>: message".
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace widom::cli
