#pragma once

#include <iosfwd>
#include <string>

#include "shadowkit/model.hpp"

namespace shadowkit::cli {

struct RunConfig {
  std::string command;
  model::Params params;
  double eps = 1e-2;
  int k = 1;
  double x0 = 0.0;  ///< 0 selects the midpoint of the admissible layer interval
  int n = 0;        ///< 0 selects the per-command default
  double s_max = 0.05;
  double step = 0.002;
  double eps_min = 0.0;
  double tol = 1e-10;
  double eps_lo = 0.005;
  double eps_hi = 0.1;
  int k_max = 3;
  int count = 10;
  int lambda_points = 41;
  bool profiles = false;
  std::string out_dir = ".";
};

/// One "key=value" line per field, sorted by key.
std::string resolved_config(const RunConfig& cfg);

/// Runs one command and returns the process exit code (0 ok, 1 config, 2 model, 3 solver).
int run(const RunConfig& cfg, std::ostream& log);

/// Parses `shadowkit <command> [--config file] [--key=value ...]` and runs it.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shadowkit::cli
