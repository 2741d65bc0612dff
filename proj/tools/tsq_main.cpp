// tsq: scenario-driven simulator for time-symmetric quantum transitions.
//
//   tsq run <config>       execute a scenario and emit its outputs
//   tsq validate <config>  parse and validate only
//   tsq version            print the version
//
// Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "tsq/scenario.hpp"

namespace {

int run_config(const std::string& path, bool validate_only) {
  tsq::ScenarioConfig cfg;
  try {
    cfg = tsq::parse_config_file(path);
  } catch (const tsq::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const tsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (validate_only) {
    std::cout << "ok: " << cfg.scenario << "\n";
    return 0;
  }
  try {
    const tsq::RunReport report = tsq::run_scenario(cfg);
    std::cout << tsq::format_report(report);
    std::printf("wall_time_seconds = %.3f\n", report.wall_time_seconds);
    return 0;
  } catch (const tsq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tsq::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const tsq::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-symmetric quantum transition simulator"};
  app.require_subcommand(1);

  std::string run_path, validate_path;
  auto* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", run_path, "path to the scenario config")->required();
  auto* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", validate_path, "path to the scenario config")->required();
  auto* version = app.add_subcommand("version", "print version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (version->parsed()) {
    std::cout << "tsq " << tsq::version_string << "\n";
    return 0;
  }
  if (run->parsed()) return run_config(run_path, false);
  return run_config(validate_path, true);
}
