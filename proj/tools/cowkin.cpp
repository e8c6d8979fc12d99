#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cowkin/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cowkin: wave-vector bookkeeping for neutron and atom interferometers under gravity"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  bool trace = false;
  auto add_source = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value config file");
    cmd->add_option("--preset", preset, "built-in or $COWKIN_PRESET_DIR preset name (e.g. paper-2013)");
  };

  auto* table = app.add_subcommand("paper-table", "reference-setup numbers side by side with published values");
  add_source(table);
  std::optional<std::string> table_out;
  table->add_option("--out", table_out, "write the JSON result document here");
  table->add_flag("--trace", trace, "include the per-event wave-vector dump");

  auto* sweep = app.add_subcommand("sweep", "scan one numeric config key and write a CSV");
  add_source(sweep);
  std::string key, sweep_out;
  double from = 0.0, to = 0.0;
  int steps = 0;
  sweep->add_option("--key", key, "config key to scan")->required();
  sweep->add_option("--from", from, "first value (config units)")->required();
  sweep->add_option("--to", to, "last value (config units)")->required();
  sweep->add_option("--steps", steps, "number of grid points (>= 2)")->required();
  sweep->add_option("--out", sweep_out, "CSV output path")->required();

  auto* compare = app.add_subcommand("compare", "neutron vs atom loop comparison as JSON");
  add_source(compare);
  compare->add_flag("--trace", trace, "include the per-event wave-vector dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cowkin::kExitConfig;
  }

  cowkin::ConfigSource source;
  if (config_path) source.config_path = *config_path;
  source.preset = preset;

  if (*table) {
    std::optional<std::filesystem::path> out;
    if (table_out) out = *table_out;
    return cowkin::cmd_paper_table(source, trace, out, std::cout, std::cerr);
  }
  if (*sweep) return cowkin::cmd_sweep(source, key, from, to, steps, sweep_out, std::cerr);
  return cowkin::cmd_compare(source, trace, std::cout, std::cerr);
}
