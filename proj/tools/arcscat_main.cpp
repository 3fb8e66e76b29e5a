// Command-line driver: scattering experiments from a JSON config.
//
//   arcscat solve|convergence|spectrum|nearfield --config <path> [--out <dir>]
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <arcscat/cli.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Thermoelastic scattering by open arcs: boundary-integral solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  for (const auto& name : {"solve", "convergence", "spectrum", "nearfield"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment configuration")
        ->required();
    sub->add_option("--out", out_dir, "output directory (default: current)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems are configuration errors
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return arcscat::cli::run_command(command, config_path, out_dir, std::cerr);
}
