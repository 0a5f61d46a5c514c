// Command-line driver: runs a condition-number experiment from a config file.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "opcond/error.hpp"
#include "opcond/experiment.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_numerical = 2;

void write_rows(const opcond::ExperimentConfig& config, const std::vector<opcond::TableRow>& rows,
                const std::string& out, opcond::TableFormat format) {
  if (out.empty() || out == "-")
    opcond::emit_table(std::cout, config, rows, format);
  else
    opcond::emit_table(std::filesystem::path(out), config, rows, format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator preconditioning experiments"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> quad;
  run->add_option("config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--out", out, "Output path (default: config 'output' key, else stdout)");
  run->add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "text"}));
  run->add_option("--seed", seed, "Lanczos start-vector seed");
  run->add_option("--quad", quad, "Quadrature profile")->check(CLI::IsMember({"standard", "high"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  opcond::ExperimentConfig config;
  try {
    config = opcond::parse_config(config_path);
    if (seed) config.seed = *seed;
    if (quad) config.quadrature = *quad == "high" ? opcond::QuadratureProfile::high : opcond::QuadratureProfile::standard;
  } catch (const opcond::Error& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return exit_config;
  }
  if (out.empty()) out = config.output;
  const auto table_format = format == "text" ? opcond::TableFormat::text : opcond::TableFormat::csv;

  std::vector<opcond::TableRow> rows;
  try {
    rows = opcond::run_experiment(config, [&](const opcond::TableRow& row) {
      rows.push_back(row);
      std::cerr << "level " << row.level << ": dofs " << row.dofs << " done\n";
    });
  } catch (const opcond::Error& e) {
    std::cerr << "numerical failure (" << opcond::to_string(e.code()) << "): " << e.what() << "\n";
    try {
      write_rows(config, rows, out, table_format);
    } catch (const opcond::Error& io) {
      std::cerr << io.what() << "\n";
    }
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
  try {
    write_rows(config, rows, out, table_format);
  } catch (const opcond::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_config;
  }
  return exit_ok;
}
