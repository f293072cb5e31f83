// Command-line front end: defaults, then --config file, then per-key flags.
// Exit status: 0 success, 1 run failure, 2 usage or config error.
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "cpt/commands.hpp"

int main(int argc, char** argv)
{
  using namespace cpt;

  CLI::App app{"CPT pseudoresonance simulator for a Rb-87 D1 vapour cell"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);

  // One string option per config key so values reach the same parser a file uses.
  std::map<std::string, std::optional<std::string>> flag_values;
  for (const ConfigKey& key : config_keys()) {
    std::string help = key.description + " (" + key.key + (key.unit.empty() ? "" : ", " + key.unit) + ")";
    app.add_option("--" + key.flag, flag_values[key.key], help);
  }

  for (const char* name : {"spectrum", "stability", "darkstate", "zeeman", "config-reference"}) {
    app.add_subcommand(name);
  }
  app.get_subcommand("spectrum")->description("scan the Raman detuning: trace CSV and pseudoresonance report");
  app.get_subcommand("stability")->description("Allan deviation over the field and intensity grids");
  app.get_subcommand("darkstate")->description("loop parameter, CPT states and scheme classification");
  app.get_subcommand("zeeman")->description("side-pair splittings and Breit-Rabi levels over a field range");
  app.get_subcommand("config-reference")->description("print the table of config keys");

  // Usage errors share exit status 2 with config errors; --help still exits 0.
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "config-reference") {
      std::cout << config_reference();
      return 0;
    }
    RunConfig config;
    if (!config_path.empty()) { load_config_file(config, config_path); }
    for (const ConfigKey& key : config_keys()) {
      if (const auto& v = flag_values[key.key]) {
        try {
          apply_setting(config, key.key, *v);
        } catch (const ConfigError& e) {
          throw ConfigError("--" + key.flag + ": " + e.what());
        }
      }
    }
    return run_command(command, config, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "cptsim: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cptsim: " << command << " failed: " << e.what() << "\n";
    return 1;
  }
}
