#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "robinpq/config.hpp"
#include "robinpq/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  int mesh_n = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "JSON config file (or a manifest from a previous run)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides the config)");
  cmd->add_option("--threads", args.threads, "worker threads for cold-start sweeps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mesh-n", args.mesh_n, "mesh resolution override")
      ->check(CLI::PositiveNumber);
}

int dispatch(const CommonArgs& args, robinpq::TaskConfig::Kind expected) {
  robinpq::RunConfig cfg = robinpq::parse_config(args.config_path);
  if (cfg.task.kind != expected)
    throw robinpq::ConfigError("config task does not match the requested command");
  robinpq::RunOptions opts;
  opts.out_override = args.out_dir;
  opts.threads = args.threads;
  opts.mesh_n = args.mesh_n;
  return robinpq::run(cfg, opts);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robinpq: Robin p-Laplacian energy solver and asymptotics verifier"};
  app.require_subcommand(1);

  CommonArgs solve_args, sweep_args, verify_args, oracle_args;
  add_common(app.add_subcommand("solve", "minimize one energy and write the field"), solve_args);
  add_common(app.add_subcommand("sweep", "solve over an alpha grid and write a CSV table"), sweep_args);
  add_common(app.add_subcommand("verify", "check an asymptotic expansion and write a report"), verify_args);
  add_common(app.add_subcommand("oracle", "emit independent 1D oracle energies"), oracle_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("solve")) return dispatch(solve_args, robinpq::TaskConfig::Kind::Solve);
    if (app.got_subcommand("sweep")) return dispatch(sweep_args, robinpq::TaskConfig::Kind::Sweep);
    if (app.got_subcommand("verify")) return dispatch(verify_args, robinpq::TaskConfig::Kind::Verify);
    if (app.got_subcommand("oracle")) return dispatch(oracle_args, robinpq::TaskConfig::Kind::Oracle);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
