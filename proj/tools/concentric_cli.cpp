// concentric: fit concentric ellipses to a point file, run Monte Carlo
// experiments, and tabulate theoretical biases.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <concentric/commands.hpp>
#include <concentric/errors.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

std::vector<concentric::Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<concentric::Method> out;
  for (const auto& n : names) out.push_back(concentric::parse_method(n));
  return out;
}

// Writes only after the command has succeeded, so a failed run never leaves
// a truncated file behind.
void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw concentric::InputError("cannot write " + path);
  file << text;
  if (!file) throw concentric::InputError("error writing " + path);
}

void add_config(CLI::App* sub, std::string& path) {
  sub->add_option("--config", path, "INI file of option values (key = value, one per line)");
}

// CLI11 only reads config files for the top-level app, so a subcommand's
// file is applied here. A key fills its option unless the command line
// already set it; unknown keys are errors.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    const bool root = item.parents.empty() || (item.parents.size() == 1 && (item.parents[0] == "default" ||
                                                                           item.parents[0] == sub->get_name()));
    CLI::Option* opt = nullptr;
    if (root && item.name != "config" && item.name != "help") {
      opt = sub->get_option_no_throw("--" + item.name);
      if (opt == nullptr) opt = sub->get_option_no_throw(item.name);
    }
    if (opt == nullptr) throw CLI::ConfigError::Extras(item.fullname());
    if (opt->count() == 0) {
      opt->add_result(item.inputs);
      opt->run_callback();
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concentric ellipse fitting with algebraic estimators"};
  app.require_subcommand(1);

  std::vector<std::string> method_names;
  std::string output;

  concentric::FitCommand fit;
  std::string format = "json";
  auto* fit_cmd = app.add_subcommand("fit", "Fit every method to a headered x,y,ring CSV");
  fit_cmd->add_option("input", fit.input, "Point file")->required();
  fit_cmd->add_option("--f0", fit.f0, "Coordinate scale factor")->capture_default_str();
  fit_cmd->add_option("--methods", method_names, "Comma list of ls, oleary, taubin, semi, hyper")->delimiter(',');
  fit_cmd->add_option("--format", format, "json or table")->capture_default_str();
  fit_cmd->add_option("--output,-o", output, "Output file (default stdout)");
  std::string config;
  add_config(fit_cmd, config);

  concentric::SimulateCommand sim;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  double sim_f0 = 0.0;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo NMSE, bias and convergence rate as CSV");
  sim_cmd->add_option("--preset", sim.preset, "exp1, exp2 or a scenario family")->capture_default_str();
  sim_cmd->add_option("--sigma", sim.sigmas, "Noise level; repeat for a grid")->delimiter(',');
  auto* runs_opt = sim_cmd->add_option("--runs", runs, "Runs per noise level (default 10000)");
  auto* seed_opt = sim_cmd->add_option("--seed", seed, "Base seed; run b uses seed + b");
  auto* sim_f0_opt = sim_cmd->add_option("--f0", sim_f0, "Scale factor (preset default 1)");
  sim_cmd->add_option("--methods", method_names, "Comma list of methods")->delimiter(',');
  sim_cmd->add_option("--threads", sim.threads, "Worker threads, 0 for all cores")->capture_default_str();
  sim_cmd->add_option("--output,-o", output, "Output file (default stdout)");
  add_config(sim_cmd, config);

  concentric::BiasScanCommand scan;
  double scan_f0 = 0.0;
  auto* scan_cmd = app.add_subcommand("bias-scan", "Theoretical ||bias / sigma^2|| over a scenario family as CSV");
  scan_cmd->add_option("--preset,--family", scan.family,
                       "scenario1, scenario2, scenario3-high or scenario3-low")
      ->capture_default_str();
  auto* scan_f0_opt = scan_cmd->add_option("--f0", scan_f0, "Scale factor (default 1)");
  scan_cmd->add_option("--methods", method_names, "Comma list of methods")->delimiter(',');
  scan_cmd->add_option("--output,-o", output, "Output file (default stdout)");
  add_config(scan_cmd, config);

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : {fit_cmd, sim_cmd, scan_cmd}) {
      if (*sub) apply_config(sub, config);
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    std::ostringstream out;
    if (*fit_cmd) {
      if (!method_names.empty()) fit.methods = parse_methods(method_names);
      fit.format = concentric::parse_output_format(format);
      concentric::cmd_fit(fit, out);
    } else if (*sim_cmd) {
      if (!method_names.empty()) sim.methods = parse_methods(method_names);
      if (*runs_opt) sim.runs = runs;
      if (*seed_opt) sim.seed = seed;
      if (*sim_f0_opt) sim.f0 = sim_f0;
      concentric::cmd_simulate(sim, out, std::cerr);
    } else {
      if (!method_names.empty()) scan.methods = parse_methods(method_names);
      if (*scan_f0_opt) scan.f0 = scan_f0;
      concentric::cmd_bias_scan(scan, out, std::cerr);
    }
    emit(out.str(), output);
  } catch (const concentric::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const concentric::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return 0;
}
