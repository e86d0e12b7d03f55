#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "emis/parallel.hpp"
#include "emis_cli/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"emis: electromagnetic inverse scattering driver"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<std::string> data;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--output", output, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "noise seed (overrides the config)");
    sub->add_option("--n", n, "regularization index N (overrides the config)");
    sub->add_flag("--quiet", quiet, "suppress progress messages");
  };
  add_common(app.add_subcommand("synth", "synthesize scattering data"));
  add_common(app.add_subcommand("forward", "solve one forward problem and write the field"));
  CLI::App* invert = app.add_subcommand("invert", "reconstruct the contrast from a dataset file");
  add_common(invert);
  invert->add_option("--data", data, "dataset CSV written by synth")->required();
  add_common(app.add_subcommand("pipeline", "synthesize, corrupt, invert and score"));
  add_common(app.add_subcommand("validate", "check invariants for a configuration"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "emis: config failed: " << e.what() << '\n';
    return emis::cli::kExitConfig;
  }

  if (const char* threads = std::getenv("EMIS_THREADS")) {
    const int t = std::atoi(threads);
    if (t > 0) emis::set_thread_count(t);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  emis::cli::Overrides overrides{output, seed, n, quiet};
  return emis::cli::run_command(command, config_path, overrides, data);
}
