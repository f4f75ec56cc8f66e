#include "cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace kgwell::cli;

  CLI::App app{"kgwell: coupled Klein-Gordon simulator with boundary damping and decay verification"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  bool no_plot = false;
  std::string checks = "well,equivalence,dissipation,bound";
  std::string parameter;
  std::vector<std::string> values;

  auto* constants = app.add_subcommand("constants", "Compute and print the well and decay constants");
  auto* validate = app.add_subcommand("validate", "Check (rho, n, theta) against the existence hypotheses");
  auto* run = app.add_subcommand("run", "Simulate a scenario and verify the trajectory");
  auto* sweep = app.add_subcommand("sweep", "Run one simulation per value of a numeric config key");

  for (auto* sub : {constants, validate, run, sweep}) {
    sub->add_option("--config", config_path, "Scenario config file")->required();
  }
  for (auto* sub : {run, sweep}) {
    sub->add_option("--out", options.out_dir, "Output directory");
    sub->add_flag("--no-plot", no_plot, "Skip the SVG decay plot");
    sub->add_option("--check", checks, "Checks deciding the exit status: well,equivalence,dissipation,bound");
  }
  sweep->add_option("--param", parameter, "Config key to vary, e.g. initial.u.amplitude")->required();
  sweep->add_option("--values", values, "Values to assign (comma separated)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  kgwell::KeyValueConfig config;
  if (!load_config(config_path, config, std::cerr)) return kConfigError;
  options.plot = !no_plot;
  try {
    options.checks = kgwell::CheckSelection::parse(checks);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  if (*constants) return cmd_constants(config, std::cout, std::cerr);
  if (*validate) return cmd_validate(config, std::cout, std::cerr);
  if (*run) return cmd_run(config, options, std::cout, std::cerr);
  return cmd_sweep(config, parameter, values, options, std::cout, std::cerr);
}
