#include "deltacouple/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "deltacouple/closed_form.hpp"
#include "deltacouple/greens.hpp"
#include "deltacouple/matcher.hpp"
#include "deltacouple/oracle.hpp"

namespace deltacouple {

using json = nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::Config, "config: " + what);
}

const json& field(const json& obj, const std::string& key,
                  const std::string& path) {
  if (!obj.is_object()) config_error(path + ": expected object");
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(path + "." + key + ": missing");
  return *it;
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number()) config_error(path + "." + key + ": expected number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key,
                 const std::string& path, double fallback) {
  return obj.contains(key) ? number(obj, key, path) : fallback;
}

std::string text(const json& obj, const std::string& key,
                 const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) config_error(path + "." + key + ": expected string");
  return v.get<std::string>();
}

PotentialSpec parse_channel(const json& j, const std::string& path) {
  const std::string kind = text(j, "kind", path);
  try {
    if (kind == "constant") {
      return PotentialSpec::constant(number(j, "offset", path));
    }
    if (kind == "linear") return PotentialSpec::linear(number(j, "slope", path));
    if (kind == "exponential") {
      return PotentialSpec::exponential(number(j, "amplitude", path),
                                        number(j, "rate", path));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    config_error(path + ": " + e.what());
  }
  config_error(path + ".kind: unknown kind \"" + kind + "\"");
}

json channel_json(const PotentialSpec& s) {
  switch (s.kind()) {
    case PotentialKind::Constant:
      return {{"kind", "constant"}, {"offset", s.offset()}};
    case PotentialKind::Linear:
      return {{"kind", "linear"}, {"slope", s.slope()}};
    case PotentialKind::Exponential:
      return {{"kind", "exponential"},
              {"amplitude", s.amplitude()},
              {"rate", s.rate()}};
  }
  return {};
}

std::size_t line_of(const std::string& s, std::size_t byte) {
  byte = std::min(byte, s.size());
  return 1 + static_cast<std::size_t>(
                 std::count(s.begin(), s.begin() + static_cast<long>(byte), '\n'));
}

bool all_constant(const StarProblem& p) {
  return std::all_of(p.channels.begin(), p.channels.end(), [](const auto& c) {
    return c.kind() == PotentialKind::Constant;
  });
}

// ---------------------------------------------------------------------------
// Rows.

ScanRow to_row(double energy, Route route, const ScatteringSolution& s) {
  ScanRow r;
  r.energy = energy;
  r.route = route;
  r.t_cross_total = s.t_cross_total;
  r.t_cross.resize(s.t_cross.size());
  for (std::size_t c = 0; c < s.t_cross.size(); ++c) {
    if (c != s.incident.channel) r.t_cross[c] = s.t_cross[c];
  }
  r.r_back = s.r_back;
  r.t_same = s.t_same;
  r.flux_residual = s.flux_residual;
  return r;
}

enum class Layout { None, ConstantPair, LinearPair, ExponentialPair };

// Which two-state closed form, if any, covers the problem.
Layout closed_form_layout(const StarProblem& p) {
  if (p.size() != 2 || p.couplings[0].position != 0.0 ||
      p.incident.channel != 0 || p.incident.side != Side::Left) {
    return Layout::None;
  }
  const auto& a = p.channels[0];
  const auto& b = p.channels[1];
  if (a.kind() == PotentialKind::Constant && b.kind() == PotentialKind::Constant) {
    return Layout::ConstantPair;
  }
  if (a.kind() == PotentialKind::Linear && b.kind() == PotentialKind::Linear &&
      a.slope() > 0.0 && b.slope() < 0.0) {
    return Layout::LinearPair;
  }
  if (a.kind() == PotentialKind::Exponential &&
      b.kind() == PotentialKind::Exponential && a.rate() > 0.0 &&
      b.rate() == -a.rate() && a.amplitude() == b.amplitude()) {
    return Layout::ExponentialPair;
  }
  return Layout::None;
}

std::optional<ScanRow> closed_form_row(const StarProblem& p) {
  const auto& a = p.channels[0];
  const auto& b = p.channels[1];
  const double k = p.couplings[0].strength;
  std::optional<TwoStateSolution> s;
  switch (closed_form_layout(p)) {
    case Layout::ConstantPair:
      s = solve_constant_pair(a.offset(), b.offset(), k, p.mass, p.hbar, p.energy);
      break;
    case Layout::LinearPair:
      s = solve_linear_pair(a.slope(), -b.slope(), k, p.mass, p.hbar, p.energy);
      break;
    case Layout::ExponentialPair:
      s = solve_exponential_pair(a.amplitude(), a.rate(), k, p.mass, p.hbar,
                                 p.energy);
      break;
    case Layout::None:
      return std::nullopt;
  }
  ScanRow r;
  r.energy = p.energy;
  r.route = Route::ClosedForm;
  r.t_cross_total = s->result.t_cross;
  r.t_cross = {std::nullopt, s->result.t_cross};
  r.r_back = s->result.r_back;
  r.t_same = s->result.t_same;
  r.flux_residual = s->result.flux_residual;
  return r;
}

ScanRow solve_row(const StarProblem& p, Route route) {
  switch (route) {
    case Route::Matcher:
      return to_row(p.energy, route, solve_star(p));
    case Route::Greens:
      return to_row(p.energy, route, solve_greens(p));
    case Route::Oracle:
      return to_row(p.energy, route, dense_match_solve(p));
    case Route::ClosedForm: {
      auto r = closed_form_row(p);
      if (!r) {
        throw Error(ErrorCode::UseMatcher,
                    "closed_form: not applicable to this problem (use matcher)");
      }
      return *r;
    }
    case Route::All:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "route all has no single row");
}

struct EnergyResult {
  std::vector<ScanRow> rows;
  std::vector<std::string> messages;
  bool breach = false;
  bool failure = false;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double max_disagreement(const ScanRow& a, const ScanRow& b) {
  double d = 0.0;
  auto cmp = [&](const std::optional<double>& x, const std::optional<double>& y) {
    if (x && y) d = std::max(d, std::abs(*x - *y));
  };
  cmp(a.t_cross_total, b.t_cross_total);
  cmp(a.r_back, b.r_back);
  cmp(a.t_same, b.t_same);
  for (std::size_t c = 0; c < std::min(a.t_cross.size(), b.t_cross.size()); ++c) {
    cmp(a.t_cross[c], b.t_cross[c]);
  }
  return d;
}

EnergyResult scan_energy(const ScanConfig& cfg, double energy, double tol) {
  EnergyResult out;
  StarProblem p = cfg.problem;
  p.energy = energy;
  try {
    validate_problem(p);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Threshold || e.code() == ErrorCode::NoIncidentWave) {
      out.messages.push_back("warning: E=" + fmt(energy) + " skipped: " + e.what());
      return out;
    }
    throw;
  }

  std::vector<Route> routes;
  if (cfg.route == Route::All) {
    if (closed_form_layout(p) != Layout::None) routes.push_back(Route::ClosedForm);
    routes.insert(routes.end(), {Route::Matcher, Route::Greens, Route::Oracle});
  } else {
    routes.push_back(cfg.route);
  }
  for (Route r : routes) {
    try {
      ScanRow row = solve_row(p, r);
      if (*row.flux_residual > tol) {
        out.breach = true;
        out.messages.push_back("mark: E=" + fmt(energy) + " route=" +
                               route_name(r) + " flux_residual " +
                               fmt(*row.flux_residual) + " > " + fmt(tol));
      }
      out.rows.push_back(std::move(row));
    } catch (const Error& e) {
      out.failure = true;
      out.messages.push_back("error: E=" + fmt(energy) + " route=" +
                             route_name(r) + ": " + e.what());
      ScanRow row;
      row.energy = energy;
      row.route = r;
      row.t_cross.resize(p.size());
      out.rows.push_back(std::move(row));
    }
  }
  if (cfg.route == Route::All) {
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      for (std::size_t j = i + 1; j < out.rows.size(); ++j) {
        const double d = max_disagreement(out.rows[i], out.rows[j]);
        if (d > tol) {
          out.breach = true;
          out.messages.push_back("mark: E=" + fmt(energy) + " routes " +
                                 route_name(out.rows[i].route) + "/" +
                                 route_name(out.rows[j].route) +
                                 " disagree by " + fmt(d));
        }
      }
    }
  }
  return out;
}

void put_optional(std::ostream& out, const std::optional<double>& v) {
  out << ',' << (v ? fmt(*v) : "NA");
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

const char* route_name(Route route) {
  switch (route) {
    case Route::ClosedForm:
      return "closed_form";
    case Route::Matcher:
      return "matcher";
    case Route::Greens:
      return "greens";
    case Route::Oracle:
      return "oracle";
    case Route::All:
      return "all";
  }
  return "";
}

std::optional<Route> parse_route(const std::string& name) {
  for (Route r : {Route::ClosedForm, Route::Matcher, Route::Greens,
                  Route::Oracle, Route::All}) {
    if (name == route_name(r)) return r;
  }
  return std::nullopt;
}

ScanConfig parse_config(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    config_error("line " + std::to_string(line_of(body, e.byte)) +
                 ": invalid JSON (" + e.what() + ")");
  }
  ScanConfig cfg;
  const json& prob = field(doc, "problem", "config");
  const json& chans = field(prob, "channels", "problem");
  if (!chans.is_array()) config_error("problem.channels: expected array");
  for (std::size_t i = 0; i < chans.size(); ++i) {
    cfg.problem.channels.push_back(
        parse_channel(chans[i], "problem.channels[" + std::to_string(i) + "]"));
  }
  const json& cps = field(prob, "couplings", "problem");
  if (!cps.is_array()) config_error("problem.couplings: expected array");
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const std::string path = "problem.couplings[" + std::to_string(i) + "]";
    cfg.problem.couplings.push_back(
        {number(cps[i], "position", path), number(cps[i], "strength", path)});
  }
  cfg.problem.mass = number_or(prob, "mass", "problem", 1.0);
  cfg.problem.hbar = number_or(prob, "hbar", "problem", 1.0);
  if (prob.contains("incident")) {
    const json& inc = prob["incident"];
    const double ch = number(inc, "channel", "problem.incident");
    if (!(ch >= 1.0 && ch == std::floor(ch))) {
      config_error("problem.incident.channel: expected integer >= 1");
    }
    cfg.problem.incident.channel = static_cast<std::size_t>(ch) - 1;
    const std::string side = text(inc, "side", "problem.incident");
    if (side != "left" && side != "right") {
      config_error("problem.incident.side: expected \"left\" or \"right\"");
    }
    cfg.problem.incident.side = side == "left" ? Side::Left : Side::Right;
  }

  const json& en = field(doc, "energies", "config");
  cfg.energies.min = number(en, "min", "energies");
  cfg.energies.max = number(en, "max", "energies");
  const double count = number(en, "count", "energies");
  if (!(count >= 2.0 && count == std::floor(count) && count < 1e8)) {
    config_error("energies.count: expected integer >= 2");
  }
  cfg.energies.count = static_cast<int>(count);
  if (!(cfg.energies.min < cfg.energies.max)) {
    config_error("energies: need min < max");
  }
  if (en.contains("spacing")) {
    const std::string s = text(en, "spacing", "energies");
    if (s == "linear") {
      cfg.energies.spacing = Spacing::Linear;
    } else if (s == "log") {
      cfg.energies.spacing = Spacing::Log;
      if (!(cfg.energies.min > 0.0)) {
        config_error("energies.min: log spacing needs min > 0");
      }
    } else {
      config_error("energies.spacing: expected \"linear\" or \"log\"");
    }
  }

  if (doc.contains("route")) {
    const std::string r = text(doc, "route", "config");
    const auto route = parse_route(r);
    if (!route) config_error("route: unknown route \"" + r + "\"");
    cfg.route = *route;
  }
  if (doc.contains("output")) {
    const json& out = doc["output"];
    if (out.contains("path")) cfg.output_path = text(out, "path", "output");
    if (out.contains("format")) {
      const std::string f = text(out, "format", "output");
      if (f != "csv" && f != "json") {
        config_error("output.format: expected \"csv\" or \"json\"");
      }
      cfg.format = f == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    }
  }

  // Structural checks that do not depend on the energy.
  const std::size_t n = cfg.problem.channels.size();
  if (n < 2) config_error("problem.channels: need at least 2 channels (N >= 2)");
  if (cfg.problem.couplings.size() + 1 != n) {
    config_error("problem.couplings: couplings must number N-1");
  }
  if (cfg.problem.incident.channel >= n) {
    config_error("problem.incident.channel: out of range");
  }
  if (!(cfg.problem.mass > 0.0)) config_error("problem.mass: must be positive");
  if (!(cfg.problem.hbar > 0.0)) config_error("problem.hbar: must be positive");
  for (std::size_t i = 0; i < cfg.problem.couplings.size(); ++i) {
    if (!(cfg.problem.couplings[i].strength >= 0.0)) {
      config_error("problem.couplings[" + std::to_string(i) +
                   "].strength: must be >= 0");
    }
  }
  return cfg;
}

std::string serialize_config(const ScanConfig& cfg) {
  json chans = json::array();
  for (const auto& c : cfg.problem.channels) chans.push_back(channel_json(c));
  json cps = json::array();
  for (const auto& c : cfg.problem.couplings) {
    cps.push_back({{"position", c.position}, {"strength", c.strength}});
  }
  json doc;
  doc["problem"] = {
      {"channels", chans},
      {"couplings", cps},
      {"mass", cfg.problem.mass},
      {"hbar", cfg.problem.hbar},
      {"incident",
       {{"channel", cfg.problem.incident.channel + 1},
        {"side", cfg.problem.incident.side == Side::Left ? "left" : "right"}}}};
  doc["energies"] = {
      {"min", cfg.energies.min},
      {"max", cfg.energies.max},
      {"count", cfg.energies.count},
      {"spacing", cfg.energies.spacing == Spacing::Linear ? "linear" : "log"}};
  doc["route"] = route_name(cfg.route);
  doc["output"] = {{"path", cfg.output_path},
                   {"format", cfg.format == OutputFormat::Csv ? "csv" : "json"}};
  return doc.dump(2) + "\n";
}

ScanConfig emit_preset(const std::string& name) {
  ScanConfig cfg;
  cfg.energies.count = 200;
  auto& p = cfg.problem;
  if (name == "figure-const") {
    p.channels = {PotentialSpec::constant(0.0), PotentialSpec::constant(5.0)};
    p.couplings = {{0.0, 1.0}};
    cfg.energies.min = 5.05;
    cfg.energies.max = 50.0;
  } else if (name == "figure-linear") {
    p.channels = {PotentialSpec::linear(1.0), PotentialSpec::linear(-1.0)};
    p.couplings = {{0.0, 1.0}};
    cfg.energies.min = 0.1;
    cfg.energies.max = 10.0;
  } else if (name == "figure-expo") {
    p.channels = {PotentialSpec::exponential(1.0, 1.0),
                  PotentialSpec::exponential(1.0, -1.0)};
    p.couplings = {{0.0, 0.1}};
    cfg.energies.min = 0.1;
    cfg.energies.max = 10.0;
  } else {
    throw Error(ErrorCode::Config, "unknown preset \"" + name +
                                       "\" (figure-const, figure-linear, "
                                       "figure-expo)");
  }
  return cfg;
}

std::vector<double> energy_points(const EnergyGrid& g) {
  std::vector<double> e(static_cast<std::size_t>(g.count));
  const double span = g.count - 1;
  for (int i = 0; i < g.count; ++i) {
    const double t = i / span;
    e[static_cast<std::size_t>(i)] =
        g.spacing == Spacing::Linear
            ? g.min + t * (g.max - g.min)
            : std::exp(std::log(g.min) + t * (std::log(g.max) - std::log(g.min)));
  }
  e.front() = g.min;
  e.back() = g.max;
  return e;
}

double route_tolerance(const StarProblem& problem) {
  return all_constant(problem) ? 1e-10 : 1e-8;
}

ScanReport run_scan(const ScanConfig& cfg, int jobs) {
  const auto energies = energy_points(cfg.energies);
  const double tol = route_tolerance(cfg.problem);
  std::vector<EnergyResult> results(energies.size());
  std::vector<std::exception_ptr> errors(energies.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < energies.size(); i = next++) {
      try {
        results[i] = scan_energy(cfg, energies[i], tol);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(jobs, 1, 256);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ScanReport report;
  report.channels = cfg.problem.size();
  for (auto& r : results) {
    for (auto& row : r.rows) report.rows.push_back(std::move(row));
    for (auto& m : r.messages) report.messages.push_back(std::move(m));
    report.tolerance_breach = report.tolerance_breach || r.breach;
    report.row_failure = report.row_failure || r.failure;
  }
  return report;
}

void write_csv(std::ostream& out, const ScanReport& report) {
  out << "energy,route,t_cross_total";
  for (std::size_t c = 0; c < report.channels; ++c) out << ",t_cross_ch" << c + 1;
  out << ",r_back,t_same,flux_residual\n";
  for (const auto& r : report.rows) {
    out << fmt(r.energy) << ',' << route_name(r.route);
    put_optional(out, r.t_cross_total);
    for (std::size_t c = 0; c < report.channels; ++c) {
      put_optional(out, c < r.t_cross.size() ? r.t_cross[c] : std::nullopt);
    }
    put_optional(out, r.r_back);
    put_optional(out, r.t_same);
    put_optional(out, r.flux_residual);
    out << '\n';
  }
}

void write_json(std::ostream& out, const ScanReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json o;
    o["energy"] = r.energy;
    o["route"] = route_name(r.route);
    o["t_cross_total"] = optional_json(r.t_cross_total);
    for (std::size_t c = 0; c < report.channels; ++c) {
      o["t_cross_ch" + std::to_string(c + 1)] =
          optional_json(c < r.t_cross.size() ? r.t_cross[c] : std::nullopt);
    }
    o["r_back"] = optional_json(r.r_back);
    o["t_same"] = optional_json(r.t_same);
    o["flux_residual"] = optional_json(r.flux_residual);
    rows.push_back(std::move(o));
  }
  out << rows.dump(2) << '\n';
}

}  // namespace deltacouple
