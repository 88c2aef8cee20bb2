#pragma once

#include <concentric/design_matrices.hpp>
#include <concentric/error_analysis.hpp>
#include <concentric/estimators.hpp>
#include <concentric/geometry.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace concentric {

/// Isotropic Gaussian noise with standard deviation `sigma` per coordinate.
struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// A Monte Carlo experiment: true geometry, the arc [arc_start, arc_end] in
/// eccentric-anomaly parameter carrying `counts[i]` points on ring i, the
/// noise, and the number of runs.
struct Scenario {
  std::string name;
  GeometricParams geometry;
  double arc_start = 0.0;
  double arc_end = 0.0;
  std::vector<std::size_t> counts;
  double f0 = 1.0;
  NoiseModel noise;
  std::size_t runs = 10000;

  double arc_length() const { return arc_end - arc_start; }
};

void validate(const Scenario& scenario);

/// Points equally spaced in the eccentric anomaly t. Both arc ends are
/// included, except for a full turn (length >= 2 pi) where the end point
/// would repeat the start.
DataSet generate_true_points(const Scenario& scenario);

/// Adds independent N(0, sigma^2) noise to every coordinate. The same seed
/// always yields the same output.
DataSet add_noise(const DataSet& data, const NoiseModel& noise);

TrueScene true_scene(const Scenario& scenario);

struct MethodMetrics {
  Method method = Method::LS;
  /// sum ||theta_hat - theta||^2 / (sigma^2 runs_used); raw mean squared
  /// error when sigma == 0.
  double nmse = 0.0;
  /// ||mean(theta_hat) - theta|| / sigma^2; raw when sigma == 0.
  double nb = 0.0;
  /// Mean wall-clock seconds per fit over every attempted run.
  double art_seconds = 0.0;
  /// Percentage of runs that returned K real concentric ellipses.
  double convergence_rate = 0.0;
  std::size_t runs_used = 0;
  std::size_t runs_attempted = 0;
  /// Mean of theta_hat - theta over valid runs (not normalized).
  Vector mean_error;
  /// Largest ||M theta - lambda N theta|| / ||M|| seen over all runs.
  double max_relative_residual = 0.0;

  bool all_runs_failed() const { return runs_used == 0; }
};

struct MetricsReport {
  double sigma = 0.0;
  /// False for sigma == 0, where nmse and nb are raw errors.
  bool normalized = true;
  std::vector<MethodMetrics> methods;

  const MethodMetrics& at(Method method) const;
};

/// Throws AllRunsFailed if `metrics` has no valid run.
void require_valid_runs(const MethodMetrics& metrics);

/// Run b uses seed noise.seed + b. Invalid fits count against the
/// convergence rate but are excluded from nmse and nb. Results do not
/// depend on `threads` (0 picks the hardware concurrency), except for timing.
/// Throws AllRunsFailed when no method produced a valid run.
MetricsReport monte_carlo(const Scenario& scenario, std::span<const Method> methods,
                          const FitOptions& options = {}, unsigned threads = 0);

/// Named experiment configurations: "exp1" (long arcs) and "exp2" (short
/// arcs), plus the base scenes of the bias-scan families.
std::map<std::string, Scenario> experiment_presets();

/// A one-parameter family of scenes for theoretical bias sweeps.
struct ScenarioFamily {
  std::string name;
  std::string sweep_variable;
  std::vector<double> grid;
  std::function<Scenario(double)> at;
};

/// "scenario1" (arc length), "scenario2" (inner semi-major axis),
/// "scenario3-high" and "scenario3-low" (arc length centered on a
/// high- or low-curvature vertex).
std::map<std::string, ScenarioFamily> bias_scan_families();

}  // namespace concentric
