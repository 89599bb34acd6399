// cmclab: runs a lambda-ladder sweep from a YAML config and writes the report.
//
// Exit codes: 0 success, 1 unreadable config or unwritable report, 2 solver non-convergence at some ladder
// point (the report is still written), 3 invalid config or flags.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "cmclab/config.hpp"
#include "cmclab/errors.hpp"
#include "cmclab/report.hpp"
#include "cmclab/sweep.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInvalid = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMC foliation sweeps over a lambda ladder"};
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::optional<double> tol;
  std::string ladder;
  std::string emit = "all";
  app.add_option("--config", config_path, "YAML run configuration")->required();
  app.add_option("--out", out_dir, "Output directory (overrides CMCLAB_OUT_DIR and the config)");
  app.add_option("--jobs", jobs, "Worker threads for ladder points")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "Override solver.tolerance");
  app.add_option("--ladder", ladder, "Geometric ladder start:ratio:count");
  app.add_option("--emit", emit, "Report files to write")->check(CLI::IsMember({"csv", "json", "all"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  cmclab::RunConfig config;
  try {
    config = cmclab::load_config(config_path);
    if (tol) config.solver.tolerance = *tol;
    if (!ladder.empty()) config.ladder = cmclab::parse_ladder_spec(ladder);
    if (!out_dir.empty()) {
      config.output_directory = out_dir;
    } else if (const char* env = std::getenv("CMCLAB_OUT_DIR"); env && *env) {
      config.output_directory = env;
    }
    config.validate();
  } catch (const cmclab::IoError& e) {
    std::cerr << "cmclab: " << e.what() << "\n";
    return kExitIo;
  } catch (const cmclab::Error& e) {
    std::cerr << "cmclab: " << e.what() << "\n";
    return kExitInvalid;
  }

  cmclab::SweepOptions options;
  options.jobs = jobs;
  const cmclab::SweepResult result = cmclab::run_sweep(config, options);
  for (const cmclab::SolveRecord& s : result.solves)
    if (!s.converged)
      std::cerr << "cmclab: " << s.model << " lambda=" << s.lambda << " failed: " << s.error << "\n";

  try {
    cmclab::emit_report(result, config.output_directory, cmclab::parse_emit_mode(emit));
  } catch (const cmclab::IoError& e) {
    std::cerr << "cmclab: " << e.what() << "\n";
    return kExitIo;
  }
  int failed = 0;
  for (const cmclab::Check& c : result.checks) failed += !c.pass;
  std::cout << "status " << (result.all_converged() ? "ok" : "nonconvergence") << ", " << result.checks.size()
            << " checks, " << failed << " failed, report in " << config.output_directory << "\n";
  return result.exit_code();
}
