#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cscat/commands.hpp"
#include "cscat/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Channel-resolved 1D scattering on symmetric barriers"};
  app.require_subcommand(1, 1);

  cscat::RunOptions opts;
  std::string scenario, out;
  bool no_banner = false;
  unsigned threads = 1;

  for (const auto& name : cscat::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario, "scenario JSON file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--no-banner", no_banner, "omit the timestamped first line of CSV files");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cscat::kExitOk : cscat::kExitValidation;
  }

  opts.scenario = scenario;
  opts.out_dir = out;
  opts.banner = !no_banner;
  opts.threads = threads;
  const std::string command = app.get_subcommands().front()->get_name();
  return cscat::run_command(command, opts, std::cerr);
}
