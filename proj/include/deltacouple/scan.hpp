#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deltacouple/model.hpp"

namespace deltacouple {

enum class Route { ClosedForm, Matcher, Greens, Oracle, All };
enum class Spacing { Linear, Log };
enum class OutputFormat { Csv, Json };

struct EnergyGrid {
  double min = 0.0;
  double max = 0.0;
  int count = 2;
  Spacing spacing = Spacing::Linear;

  bool operator==(const EnergyGrid&) const = default;
};

/// A batch scan. problem.energy is ignored; incident.channel is zero based
/// here and one based in the JSON form.
struct ScanConfig {
  StarProblem problem;
  EnergyGrid energies;
  Route route = Route::Matcher;
  /// Empty or "-" writes to stdout.
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;

  bool operator==(const ScanConfig&) const = default;
};

/// Parses a JSON config; throws Error(ErrorCode::Config) naming the line or
/// the field path that is wrong.
ScanConfig parse_config(const std::string& text);
std::string serialize_config(const ScanConfig& config);

/// "figure-const", "figure-linear" or "figure-expo".
ScanConfig emit_preset(const std::string& name);

std::vector<double> energy_points(const EnergyGrid& grid);

const char* route_name(Route route);
std::optional<Route> parse_route(const std::string& name);

struct ScanRow {
  double energy = 0.0;
  Route route = Route::Matcher;
  std::optional<double> t_cross_total;
  /// Per channel (zero based); empty entry for the incident channel.
  std::vector<std::optional<double>> t_cross;
  std::optional<double> r_back;
  std::optional<double> t_same;
  std::optional<double> flux_residual;
};

struct ScanReport {
  std::size_t channels = 0;
  std::vector<ScanRow> rows;
  /// Skipped energies, per-row failures and route disagreements.
  std::vector<std::string> messages;
  bool tolerance_breach = false;
  bool row_failure = false;
};

/// Flux tolerance of a route: 1e-10 when every channel is constant, 1e-8
/// otherwise.
double route_tolerance(const StarProblem& problem);

/// One row per energy per route (route=all expands to every applicable
/// route). Rows are ordered by energy, then route, whatever `jobs` is.
ScanReport run_scan(const ScanConfig& config, int jobs = 1);

void write_csv(std::ostream& out, const ScanReport& report);
void write_json(std::ostream& out, const ScanReport& report);

}  // namespace deltacouple
