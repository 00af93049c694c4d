#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynsymlab/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTheorem = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  double tol = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config JSON")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--tol", args.tol, "override finder residual tolerance");
}

dynsymlab::ExperimentConfig load(const CommonArgs& args) {
  auto config = dynsymlab::load_config(args.config_path);
  if (args.tol > 0.0) config.finder.tol_residual = args.tol;
  return config;
}

std::filesystem::path out_dir_for(const CommonArgs& args,
                                  const dynsymlab::ExperimentConfig& config) {
  return args.out_dir.empty() ? std::filesystem::path(config.outputs.directory)
                              : std::filesystem::path(args.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamical-symmetry laboratory"};
  app.require_subcommand(1);

  CommonArgs find_args, evolve_args, th1_args, th2_args, demo_args;
  auto* cmd_find = app.add_subcommand(
      "find", "find dynamical symmetries and charges of a model");
  add_common(cmd_find, find_args);
  auto* cmd_evolve = app.add_subcommand(
      "evolve", "exact-diagonalization expectation-value dynamics");
  add_common(cmd_evolve, evolve_args);
  auto* cmd_th1 = app.add_subcommand(
      "theorem1", "build and verify the charge of every symmetry pair");
  add_common(cmd_th1, th1_args);
  auto* cmd_th2 = app.add_subcommand(
      "theorem2", "rebuild the model from charges and verify root eigenvalues");
  add_common(cmd_th2, th2_args);
  auto* cmd_demo = app.add_subcommand(
      "demo", "side-by-side comparison of two coupling configurations");
  std::string demo_second;
  add_common(cmd_demo, demo_args);
  cmd_demo
      ->add_option("--config2", demo_second,
                   "second config (couplings-only variation)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_find->parsed()) {
      const auto config = load(find_args);
      dynsymlab::run_find(config, out_dir_for(find_args, config));
    } else if (cmd_evolve->parsed()) {
      const auto config = load(evolve_args);
      dynsymlab::run_evolve(config, out_dir_for(evolve_args, config));
    } else if (cmd_th1->parsed()) {
      const auto config = load(th1_args);
      dynsymlab::run_theorem1(config, out_dir_for(th1_args, config));
    } else if (cmd_th2->parsed()) {
      const auto config = load(th2_args);
      dynsymlab::run_theorem2(config, out_dir_for(th2_args, config));
    } else if (cmd_demo->parsed()) {
      const auto first = load(demo_args);
      auto second = dynsymlab::load_config(demo_second);
      if (demo_args.tol > 0.0) second.finder.tol_residual = demo_args.tol;
      dynsymlab::run_demo(first, second, out_dir_for(demo_args, first));
    }
  } catch (const dynsymlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dynsymlab::TheoremViolation& e) {
    std::cerr << "theorem violation (likely a bug): " << e.what() << "\n";
    return kExitTheorem;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
