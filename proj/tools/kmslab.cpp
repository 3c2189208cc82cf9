#include "kmslab/cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace kmslab::cli;
  CLI::App app{"Numerical lab for the nonlocal Kirchhoff-Maxwell-Schrodinger p-Laplacian system"};
  app.require_subcommand(1);

  std::string config;
  CommandOptions options;
  std::string outdir, label;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "TOML run configuration")->required();
    sub->add_option("--outdir", outdir, "Output root directory (overrides [io].outdir)");
    sub->add_option("--label", label, "Run label (overrides [io].label)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  if (!outdir.empty()) options.outdir = outdir;
  if (!label.empty()) options.label = label;
  const std::string command = app.get_subcommands().front()->get_name();
  return run_command_file(command, config, options, std::cout, std::cerr);
}
