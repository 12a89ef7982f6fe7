#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "robinpq/asymptotics.hpp"
#include "robinpq/problem.hpp"
#include "robinpq/solvers.hpp"

namespace robinpq {

inline constexpr const char* kVersion = "0.1.0";

struct DomainConfig {
  enum class Kind { Interval, Rectangle, File };
  Kind kind = Kind::Interval;
  double a = 0.0, b = 1.0;
  int n = 100;
  double lx = 1.0, ly = 1.0;
  int nx = 16, ny = 16;
  std::string path;
};

struct TaskConfig {
  enum class Kind { Solve, Sweep, Verify, Oracle };
  Kind kind = Kind::Solve;
  SolveSetting setting = SolveSetting::Robin;  // solve task
  std::vector<double> alphas;                  // sweep/verify; empty = regime default
  VerifyRegime regime = VerifyRegime::DirichletLimit;
  VerifyOptions verify;
  bool warm_start = true;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool field = true;
};

struct RunConfig {
  DomainConfig domain;
  double p = 2.0, q = 2.0, alpha = 1.0;
  SourceTerm source = SourceConstant{1.0};
  SolverConfig solver;
  TaskConfig task;
  OutputConfig output;

  /// Build the mesh and problem; mesh_n_override > 0 replaces n (or nx = ny).
  ProblemSpec build_problem(int mesh_n_override = 0) const;

  nlohmann::json to_json() const;  // fully resolved (defaults filled)
};

/// Parse and strictly validate a config file; also accepts a manifest
/// written by a previous run (its embedded config is used). Unknown keys are
/// rejected with their path.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j);

struct RunOptions {
  std::string out_override;  // overrides output.directory when nonempty
  int threads = 1;
  int mesh_n = 0;  // mesh resolution override
};

/// Execute the configured task, writing its artifacts. Returns the process
/// exit status: 0 on success, 2 when a verify task fails its tolerances.
int run(const RunConfig& cfg, const RunOptions& opts = {});

}  // namespace robinpq
