#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "deltacouple/scan.hpp"

namespace dc = deltacouple;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBreach = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw dc::Error(dc::ErrorCode::Config, "cannot open config file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_report(const dc::ScanReport& report, dc::OutputFormat format,
                  std::ostream& out) {
  if (format == dc::OutputFormat::Csv) {
    dc::write_csv(out, report);
  } else {
    dc::write_json(out, report);
  }
}

int run_scan_command(const std::string& config_path, const std::string& route,
                     const std::string& output, const std::string& format,
                     int jobs) {
  dc::ScanConfig cfg = dc::parse_config(read_file(config_path));
  if (!route.empty()) {
    const auto r = dc::parse_route(route);
    if (!r) throw dc::Error(dc::ErrorCode::Config, "unknown route " + route);
    cfg.route = *r;
  }
  if (!output.empty()) cfg.output_path = output;
  if (!format.empty()) {
    cfg.format = format == "json" ? dc::OutputFormat::Json : dc::OutputFormat::Csv;
  }

  const dc::ScanReport report = dc::run_scan(cfg, jobs);
  for (const auto& m : report.messages) std::cerr << m << '\n';

  if (cfg.output_path.empty() || cfg.output_path == "-") {
    write_report(report, cfg.format, std::cout);
  } else {
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
      throw dc::Error(dc::ErrorCode::Config,
                      "cannot open output file " + cfg.output_path);
    }
    write_report(report, cfg.format, out);
  }

  if (report.row_failure) return kExitUsage;
  if (report.tolerance_breach) return kExitBreach;
  return kExitOk;
}

int run_preset_command(const std::string& name, const std::string& emit_path) {
  const std::string text = dc::serialize_config(dc::emit_preset(name));
  if (emit_path.empty() || emit_path == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(emit_path, std::ios::binary);
  if (!out) {
    throw dc::Error(dc::ErrorCode::Config, "cannot open output file " + emit_path);
  }
  out << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition probabilities for delta-coupled diabatic channels"};
  app.require_subcommand(1);

  int jobs = 1;
  app.add_option("--jobs", jobs, "Energies solved in parallel")
      ->check(CLI::PositiveNumber);

  std::string config_path, route, output, format;
  auto* scan = app.add_subcommand("scan", "Scan an energy grid");
  scan->add_option("--config", config_path, "JSON config file")->required();
  scan->add_option("--route", route, "closed_form, matcher, greens, oracle or all")
      ->check(CLI::IsMember({"closed_form", "matcher", "greens", "oracle", "all"}));
  scan->add_option("--output", output, "Output file (stdout if omitted or -)");
  scan->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  scan->add_option("--jobs", jobs, "Energies solved in parallel")
      ->check(CLI::PositiveNumber);

  std::string preset_name, emit_path;
  auto* preset = app.add_subcommand("preset", "Emit a figure preset config");
  preset->add_option("name", preset_name, "figure-const, figure-linear or figure-expo")
      ->required();
  preset->add_option("--emit-config", emit_path, "Write the config here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*scan) return run_scan_command(config_path, route, output, format, jobs);
    return run_preset_command(preset_name, emit_path);
  } catch (const dc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
