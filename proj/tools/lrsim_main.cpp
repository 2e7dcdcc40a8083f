// Scenario-driven front end: run pipelines, emit CSV series and verification
// reports. Exit codes: 0 success, 2 configuration problem, 3 numerical check
// failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lrsim/scenario.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<double> step;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "scenario config file")->required();
  cmd->add_option("--step", args.step, "override the integration step");
  cmd->add_option("--out", args.out_dir, "override the output directory");
}

lrsim::RunOptions make_options(const CommonArgs& args, bool dump) {
  lrsim::RunOptions opts;
  opts.step = args.step;
  opts.dump_trajectories = dump;
  if (args.out_dir) {
    opts.output_dir = args.out_dir;
  } else if (const char* env = std::getenv("LRSIM_OUTPUT_DIR")) {
    opts.output_dir = std::string(env);
  }
  return opts;
}

lrsim::Scenario load(const CommonArgs& args) {
  return lrsim::load_scenario(lrsim::parse_config_file(args.config_path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lie-algebra invariant decoherence simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  bool dump_trajectories = false;
  CLI::App* run = app.add_subcommand("run", "solve the scenario and emit CSV series");
  add_common(run, run_args);
  run->add_flag("--dump-trajectories", dump_trajectories,
                "also emit oracle trajectories per branch");

  CommonArgs verify_args;
  CLI::App* verify =
      app.add_subcommand("verify", "run the cross-route checks and emit a report");
  add_common(verify, verify_args);

  CommonArgs scan_args;
  std::optional<double> delta;
  std::optional<double> jmax;
  CLI::App* scan = app.add_subcommand("scan-j", "classical-limit scan of |F| over j");
  add_common(scan, scan_args);
  scan->add_option("--delta", delta, "pointer separation a_i - a_j (rad)");
  scan->add_option("--jmax", jmax, "largest detector spin (half-integer)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return lrsim::run_scenario(load(run_args), make_options(run_args, dump_trajectories));
    if (verify->parsed())
      return lrsim::verify_scenario(load(verify_args), make_options(verify_args, false));
    if (scan->parsed())
      return lrsim::scan_scenario(load(scan_args), make_options(scan_args, false), delta,
                                  jmax);
  } catch (const lrsim::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lrsim::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lrsim::kExitConfig;
  }
  return lrsim::kExitConfig;
}
