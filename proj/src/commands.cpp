#include <concentric/commands.hpp>

#include <concentric/error_analysis.hpp>
#include <concentric/errors.hpp>
#include <concentric/geometry.hpp>
#include <concentric/point_io.hpp>
#include <concentric/simulation.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace concentric {
namespace {

using nlohmann::json;

std::optional<GeometricParams> try_geometry(const FitResult& r) {
  if (!r.valid) return std::nullopt;
  try {
    return theta_to_geo(r.theta);
  } catch (const Error&) {
    return std::nullopt;
  }
}

json geometry_json(const GeometricParams& g) {
  json rings = json::array();
  for (const auto& ring : g.rings) rings.push_back({{"a", ring.a}, {"b", ring.b}});
  return {{"center", {g.x_c, g.y_c}}, {"rings", rings}, {"psi", g.psi}};
}

void require_some_success(const std::vector<MethodOutcome>& outcomes) {
  const bool any = std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.result.has_value(); });
  if (!any) {
    std::string msg = "every method failed";
    for (const auto& o : outcomes) msg += "; " + std::string(to_string(o.method)) + ": " + o.error;
    throw NumericalFailure(msg);
  }
}

Scenario resolve_preset(const std::string& name) {
  auto presets = experiment_presets();
  const auto it = presets.find(name);
  if (it == presets.end()) {
    std::string known;
    for (const auto& [key, value] : presets) known += (known.empty() ? "" : ", ") + key;
    throw InputError("unknown preset '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

std::string cell(double value) { return std::isfinite(value) ? format_number(value) : ""; }

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "table") return OutputFormat::Table;
  throw InputError("unknown format '" + std::string(name) + "' (json or table)");
}

void write_fit_json(std::ostream& out, const DataSet& data, const std::vector<MethodOutcome>& outcomes) {
  json doc = json::object();
  for (const auto& o : outcomes) {
    json entry;
    if (!o.result) {
      entry["error"] = o.error;
    } else {
      const FitResult& r = *o.result;
      const Vector& t = r.theta.vector();
      entry["theta"] = std::vector<double>(t.data(), t.data() + t.size());
      entry["f0"] = data.f0;
      entry["valid"] = r.valid;
      entry["eigenvalue"] = r.eigenvalue;
      entry["relative_residual"] = r.relative_residual;
      entry["elapsed_seconds"] = r.elapsed_seconds;
      const auto g = try_geometry(r);
      entry["geometry"] = g ? geometry_json(*g) : json(nullptr);
    }
    doc[std::string(to_string(o.method))] = std::move(entry);
  }
  out << doc.dump(2) << '\n';
}

void write_fit_table(std::ostream& out, const DataSet& data, const std::vector<MethodOutcome>& outcomes) {
  const auto k = data.ring_count();
  out << std::left << std::setw(10) << "method" << std::setw(7) << "valid" << std::right
      << std::setw(14) << "x_c" << std::setw(14) << "y_c" << std::setw(12) << "psi";
  for (std::size_t i = 1; i <= k; ++i) {
    out << std::setw(13) << ("a" + std::to_string(i)) << std::setw(13) << ("b" + std::to_string(i));
  }
  out << std::setw(14) << "eigenvalue" << std::setw(12) << "ms" << '\n';

  out << std::setprecision(6);
  for (const auto& o : outcomes) {
    out << std::left << std::setw(10) << to_string(o.method);
    if (!o.result) {
      out << "failed: " << o.error << '\n';
      continue;
    }
    const FitResult& r = *o.result;
    out << std::setw(7) << (r.valid ? "yes" : "no") << std::right;
    if (const auto g = try_geometry(r)) {
      out << std::setw(14) << g->x_c << std::setw(14) << g->y_c << std::setw(12) << g->psi;
      for (const auto& ring : g->rings) out << std::setw(13) << ring.a << std::setw(13) << ring.b;
    } else {
      out << std::setw(40) << "(not concentric ellipses)" << std::setw(static_cast<int>(26 * k)) << "";
    }
    out << std::setw(14) << r.eigenvalue << std::setw(12) << 1e3 * r.elapsed_seconds << '\n';
  }
  out << "\ntheta (A, B, C, D, E, F_1..F_" << k << "), f0 = " << data.f0 << '\n';
  for (const auto& o : outcomes) {
    if (!o.result) continue;
    out << std::left << std::setw(10) << to_string(o.method) << std::right;
    for (double v : o.result->theta.vector()) out << std::setw(14) << v;
    out << '\n';
  }
}

void cmd_fit(const FitCommand& command, std::ostream& out) {
  if (command.methods.empty()) throw InputError("no methods selected");
  const DataSet data = read_points(command.input, command.f0);
  const auto outcomes = fit_all(data, command.methods);
  require_some_success(outcomes);
  if (command.format == OutputFormat::Json) {
    write_fit_json(out, data, outcomes);
  } else {
    write_fit_table(out, data, outcomes);
  }
}

void cmd_simulate(const SimulateCommand& command, std::ostream& out, std::ostream& warn) {
  if (command.methods.empty()) throw InputError("no methods selected");
  Scenario scenario = resolve_preset(command.preset);
  if (command.runs) scenario.runs = *command.runs;
  if (command.seed) scenario.noise.seed = *command.seed;
  if (command.f0) scenario.f0 = *command.f0;
  std::vector<double> sigmas = command.sigmas;
  if (sigmas.empty()) sigmas.push_back(scenario.noise.sigma);
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("sigma must be a non-negative number");
  }
  validate(scenario);
  if (scenario.runs == 0) throw InputError("runs must be at least 1");

  const double trace = leading_variance(true_scene(scenario)).trace();

  // Format everything first so a failure part way leaves no partial CSV.
  std::ostringstream csv;
  csv << "sigma,method,normalized,runs_used,nmse,nb,art_seconds,convergence_rate_pct,leading_variance_trace\n";
  for (double sigma : sigmas) {
    scenario.noise.sigma = sigma;
    const MetricsReport report = monte_carlo(scenario, command.methods, {}, command.threads);
    for (const auto& m : report.methods) {
      if (m.all_runs_failed()) {
        warn << "warning: sigma " << format_number(sigma) << ": " << to_string(m.method)
             << " returned no valid fit in " << m.runs_attempted << " runs\n";
      }
      csv << format_number(sigma) << ',' << to_string(m.method) << ',' << (report.normalized ? 1 : 0) << ','
          << m.runs_used << ',' << cell(m.nmse) << ',' << cell(m.nb) << ',' << format_number(m.art_seconds)
          << ',' << format_number(m.convergence_rate) << ',' << format_number(trace) << '\n';
    }
  }
  out << csv.str();
}

void cmd_bias_scan(const BiasScanCommand& command, std::ostream& out, std::ostream& warn) {
  if (command.methods.empty()) throw InputError("no methods selected");
  auto families = bias_scan_families();
  const auto it = families.find(command.family);
  if (it == families.end()) {
    std::string known;
    for (const auto& [key, value] : families) known += (known.empty() ? "" : ", ") + key;
    throw InputError("unknown scenario family '" + command.family + "' (known: " + known + ")");
  }
  const ScenarioFamily& family = it->second;
  const auto scene_at = [&](double value) {
    Scenario s = family.at(value);
    if (command.f0) s.f0 = *command.f0;
    return true_scene(s);
  };
  const BiasScanTable table = bias_scan(family.sweep_variable, family.grid, scene_at, command.methods);

  out << table.sweep_name;
  for (Method m : table.methods) out << ',' << to_string(m);
  out << '\n';
  for (const auto& row : table.rows) {
    out << format_number(row.sweep_value);
    for (const auto& value : row.bias_norms) {
      out << ',';
      if (value) out << format_number(*value);
    }
    out << '\n';
    for (const auto& w : row.warnings) {
      warn << "warning: " << table.sweep_name << " = " << format_number(row.sweep_value) << ": " << w << '\n';
    }
  }
}

}  // namespace concentric
