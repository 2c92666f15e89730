#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "afcsim/error.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace afcsim::cli;

  CLI::App app{"afcsim: atomic frequency comb cavity memory simulator", "afcsim"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool print_defaults = false;
  bool print_config = false;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides montecarlo.seed)");
  app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  const std::vector<std::pair<std::string, std::string>> docs{
      {"storage", "single storage run: trace CSV and summary JSON"},
      {"scan-storage-time", "efficiency versus storage time"},
      {"scan-bandwidth", "efficiency versus pulse bandwidth"},
      {"optimize-comb", "optimal comb depth and efficiency"},
      {"qubit-fringe", "time-bin qubit fringes and fidelity"},
      {"linewidth", "cavity linewidth with the spectral pit"},
      {"montecarlo", "photon-counting emulation of montecarlo.source"},
  };
  for (const auto& [name, doc] : docs) app.add_subcommand(name, doc);

  if (argc <= 1) {
    std::cerr << app.help();
    return kConfigError;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (print_defaults) {
    std::cout << format_config(RunConfig{});
    return EXIT_SUCCESS;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (*out_opt) cfg.output.directory = out_dir;
    if (*seed_opt) cfg.montecarlo.seed = seed;
    validate_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  if (print_config) {
    std::cout << format_config(cfg);
    return EXIT_SUCCESS;
  }

  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    for (const auto& path : run_command(subs.front()->get_name(), cfg))
      std::cout << path.string() << "\n";
  } catch (const afcsim::Error& e) {
    std::cerr << "error (" << afcsim::to_string(e.kind()) << "): " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
