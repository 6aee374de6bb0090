// rodsim — dynamic elastic rod solver and study driver.
//
// Subcommands:
//   simulate        cantilever trajectory CSV (t, s, state components)
//   sweep-eps       consistency quantities over an epsilon grid
//   converge-space  relative L2 error against a space-refined reference
//   converge-time   relative L2 error against a time-refined reference
//   energy          energy budget per time level with drift summary
//
// Flags override config-file keys. RODSIM_THREADS caps sweep parallelism.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cosserat/config.hpp"
#include "cosserat/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string variant;
  std::string kind;
  std::optional<double> lambda;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "configuration file (key = value lines)");
  cmd->add_option("--out", args->out_path, "output CSV path");
  cmd->add_option("--variant", args->variant, "model variant: M, T or S");
  cmd->add_option("--kind", args->kind, "system: eps, limit or correction");
  cmd->add_option("--lambda", args->lambda, "temporal tuning parameter in [0.5, 1]");
}

cosserat::RunConfig resolve_config(const CommonArgs& args) {
  cosserat::RunConfig cfg;
  if (!args.config_path.empty()) cfg = cosserat::load_config_file(args.config_path);
  if (!args.variant.empty()) cfg.variant = cosserat::parse_variant(args.variant);
  if (!args.kind.empty()) cfg.kind = cosserat::parse_kind(args.kind);
  if (args.lambda) {
    if (!(*args.lambda >= 0.5 && *args.lambda <= 1.0))
      throw std::runtime_error("--lambda must lie in [0.5, 1]");
    cfg.grid.lambda = *args.lambda;
  }
  if (!args.out_path.empty()) cfg.out = args.out_path;
  if (cfg.out.empty()) throw std::runtime_error("no output path: set --out or the `out` key");
  cfg.params.validate();
  cfg.grid.validate();
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic elastic rod solver: Cosserat system, its low-Mach/slenderness "
               "limit and the first-order correction"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* simulate = app.add_subcommand("simulate", "run a cantilever trajectory");
  CLI::App* sweep = app.add_subcommand("sweep-eps", "consistency sweep over epsilon");
  CLI::App* conv_s = app.add_subcommand("converge-space", "spatial refinement study");
  CLI::App* conv_t = app.add_subcommand("converge-time", "temporal refinement study");
  CLI::App* energy = app.add_subcommand("energy", "energy budget over a run");
  for (CLI::App* cmd : {simulate, sweep, conv_s, conv_t, energy}) add_common(cmd, &args);

  CLI11_PARSE(app, argc, argv);

  try {
    const cosserat::RunConfig cfg = resolve_config(args);
    std::ofstream os = open_output(cfg.out);
    if (simulate->parsed()) {
      cosserat::run_simulate_csv(cfg, os);
    } else if (sweep->parsed()) {
      cosserat::write_sweep_csv(os, cosserat::run_sweep_eps(cfg));
    } else if (conv_s->parsed()) {
      cosserat::write_converge_csv(os, cosserat::run_converge(cfg, cosserat::RefineAxis::Space),
                                   cosserat::RefineAxis::Space);
    } else if (conv_t->parsed()) {
      cosserat::write_converge_csv(os, cosserat::run_converge(cfg, cosserat::RefineAxis::Time),
                                   cosserat::RefineAxis::Time);
    } else if (energy->parsed()) {
      cosserat::write_energy_csv(os, cosserat::run_energy(cfg));
    }
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + cfg.out);
  } catch (const cosserat::NonConvergenceError& e) {
    std::cerr << "rodsim: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rodsim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
