#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "mupf/error.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

void add_common(CLI::App* cmd, mupf::cli::Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--mesh", o.mesh, "Wavefront OBJ mesh (meters)");
  cmd->add_option("--seed", o.seed, "Filter seed (scenario seed for simulate)");
  cmd->add_option("--output", o.output, "Output directory")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = all cores, 1 = serial");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory unscented particle filter: tactile 6-DOF localization harness"};
  app.require_subcommand(1);

  mupf::cli::Overrides o;

  auto* sim = app.add_subcommand("simulate", "Sample noisy contact points on a posed mesh");
  add_common(sim, o);

  auto* loc = app.add_subcommand("localize", "Run one filter trial and write a report");
  add_common(loc, o);
  loc->add_option("--measurements", o.measurements, "Measurement CSV (x,y,z)");
  loc->add_option("--truth", o.truth, "Ground-truth JSON written by simulate");
  loc->add_option("--particles", o.particles, "Override N");
  loc->add_option("--memory", o.memory, "Override window length m");
  loc->add_flag("--emit-trace", o.emit_trace, "Write the per-step index trace CSV");

  auto* bat = app.add_subcommand("batch", "Run independent trials and summarize");
  add_common(bat, o);
  bat->add_option("--measurements", o.measurements, "Measurement CSV (x,y,z)");
  bat->add_option("--truth", o.truth, "Ground-truth JSON written by simulate");
  bat->add_option("--trials", o.trials, "Number of trials");
  bat->add_option("--particles", o.particles, "Override N");
  bat->add_option("--memory", o.memory, "Override window length m");
  bat->add_option("--sweep-m", o.sweep_m, "Window lengths to sweep, e.g. 1..15 or 1,5,10");
  bat->add_flag("--emit-trace", o.emit_trace, "Write per-trial index traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    const auto manifest = mupf::cli::build_manifest(o);
    if (sim->parsed()) return mupf::cli::cmd_simulate(manifest);
    if (loc->parsed()) return mupf::cli::cmd_localize(manifest);
    return mupf::cli::cmd_batch(manifest);
  } catch (const mupf::Error& e) {
    std::cerr << "mupf: " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "mupf: " << e.what() << '\n';
    return kExitRuntime;
  }
}
