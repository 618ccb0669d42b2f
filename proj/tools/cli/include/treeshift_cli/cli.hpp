#pragma once

#include <optional>
#include <string>
#include <vector>

namespace treeshift::cli {

enum class Format { json, text };

/// Every default lives here and is echoed into each report.
struct RunConfig {
  std::string subcommand;
  std::string family = "general";  // certify only

  std::string input;  // combined document: tree, weights, system, t, measure, branch data
  std::string tree;
  std::string weights;
  std::string system;
  std::string measure;
  std::optional<std::string> t;  // inline moment list for check-stieltjes

  int horizon = 16;
  double tol = 1e-9;
  std::string tol_source = "default";  // "flag", "env" or "default"
  Format format = Format::json;
  std::vector<int> i_list{2, 4, 8, 16};

  std::optional<double> theta;   // backward-extend
  std::optional<std::string> vertex;  // converge
  int n = 1;                     // converge
  std::optional<int> back;       // bilateral window
};

struct RunResult {
  int exit_code = 0;
  std::string report;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitRefuted = 1;
inline constexpr int kExitConditional = 2;
inline constexpr int kExitInput = 3;

/// Never throws: input problems become exit 3 with an error report.
RunResult run(const RunConfig& config);

/// Parses argv (CLI11) and the TREESHIFT_TOL value, then runs. Flags win over
/// the environment, the environment over the default. A null env_tol means unset.
RunResult run_command_line(int argc, const char* const* argv, const char* env_tol);

}  // namespace treeshift::cli
