#pragma once

#include <concentric/estimators.hpp>
#include <concentric/types.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// The subcommands behind the `concentric` executable. They write their
// result to `out` and diagnostics to `warn`, and report failures by throwing
// the library exceptions, which the executable maps to exit codes.

namespace concentric {

enum class OutputFormat { Json, Table };

OutputFormat parse_output_format(std::string_view name);

struct FitCommand {
  std::filesystem::path input;
  double f0 = 100.0;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  OutputFormat format = OutputFormat::Json;
};

/// Throws NumericalFailure when every selected method fails.
void cmd_fit(const FitCommand& command, std::ostream& out);

/// JSON document with one top-level object per method.
void write_fit_json(std::ostream& out, const DataSet& data, const std::vector<MethodOutcome>& outcomes);
void write_fit_table(std::ostream& out, const DataSet& data, const std::vector<MethodOutcome>& outcomes);

struct SimulateCommand {
  std::string preset = "exp1";
  /// Empty means the preset's own sigma.
  std::vector<double> sigmas;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<double> f0;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  unsigned threads = 0;
};

/// CSV, one row per (sigma, method). Rows for a method without any valid
/// run carry empty metric cells and a warning.
void cmd_simulate(const SimulateCommand& command, std::ostream& out, std::ostream& warn);

struct BiasScanCommand {
  std::string family = "scenario1";
  std::optional<double> f0;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
};

/// CSV: the sweep value followed by ||bias / sigma^2|| per method.
void cmd_bias_scan(const BiasScanCommand& command, std::ostream& out, std::ostream& warn);

}  // namespace concentric
