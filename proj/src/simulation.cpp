#include <concentric/simulation.hpp>

#include <concentric/errors.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace concentric {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kChunk = 64;

struct Accumulator {
  Vector sum_error;
  double sum_sq = 0.0;
  double seconds = 0.0;
  std::size_t valid = 0;
  std::size_t attempted = 0;
  double max_residual = 0.0;

  void merge(const Accumulator& other) {
    sum_error += other.sum_error;
    sum_sq += other.sum_sq;
    seconds += other.seconds;
    valid += other.valid;
    attempted += other.attempted;
    max_residual = std::max(max_residual, other.max_residual);
  }
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace

void validate(const Scenario& scenario) {
  validate(scenario.geometry);
  if (!(scenario.arc_end > scenario.arc_start)) throw InputError("arc_end must exceed arc_start");
  if (scenario.counts.size() != scenario.geometry.ring_count()) {
    throw InputError("one point count per ring is required");
  }
  for (auto n : scenario.counts) {
    if (n == 0) throw InputError("every ring needs at least one point");
  }
  if (!(scenario.f0 > 0.0)) throw InputError("f0 must be positive");
  if (!(scenario.noise.sigma >= 0.0)) throw InputError("sigma must be non-negative");
}

DataSet generate_true_points(const Scenario& scenario) {
  validate(scenario);
  const auto& g = scenario.geometry;
  const double omega = scenario.arc_length();
  const double cp = std::cos(g.psi);
  const double sp = std::sin(g.psi);
  const bool full_turn = omega >= 2.0 * kPi;

  DataSet data;
  data.f0 = scenario.f0;
  data.rings.resize(g.ring_count());
  for (std::size_t i = 0; i < g.ring_count(); ++i) {
    const std::size_t n = scenario.counts[i];
    const double a = g.rings[i].a;
    const double b = g.rings[i].b;
    const double denom = full_turn ? static_cast<double>(n) : static_cast<double>(std::max<std::size_t>(n - 1, 1));
    data.rings[i].reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = scenario.arc_start + omega * static_cast<double>(j) / denom;
      const double ct = std::cos(t);
      const double st = std::sin(t);
      data.rings[i].push_back(
          {g.x_c + a * ct * cp - b * st * sp, g.y_c + a * ct * sp + b * st * cp});
    }
  }
  return data;
}

DataSet add_noise(const DataSet& data, const NoiseModel& noise) {
  if (noise.sigma == 0.0) return data;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> dist(0.0, noise.sigma);
  DataSet out = data;
  for (auto& ring : out.rings) {
    for (auto& p : ring) {
      p.x += dist(rng);
      p.y += dist(rng);
    }
  }
  return out;
}

TrueScene true_scene(const Scenario& scenario) {
  return make_true_scene(assemble_concentric_theta(scenario.geometry, scenario.f0),
                         generate_true_points(scenario));
}

const MethodMetrics& MetricsReport::at(Method method) const {
  for (const auto& m : methods) {
    if (m.method == method) return m;
  }
  throw InputError("method not present in report: " + std::string(to_string(method)));
}

void require_valid_runs(const MethodMetrics& metrics) {
  if (metrics.all_runs_failed()) {
    throw AllRunsFailed(std::string(to_string(metrics.method)) + " returned no valid fit");
  }
}

MetricsReport monte_carlo(const Scenario& scenario, std::span<const Method> methods,
                          const FitOptions& options, unsigned threads) {
  validate(scenario);
  if (scenario.runs == 0) throw InputError("runs must be at least 1");
  const DataSet truth = generate_true_points(scenario);
  const Vector theta = assemble_concentric_theta(scenario.geometry, scenario.f0).vector();
  const std::size_t method_count = methods.size();

  const std::size_t chunk_count = (scenario.runs + kChunk - 1) / kChunk;
  std::vector<std::vector<Accumulator>> chunks(chunk_count);

  auto run_chunk = [&](std::size_t c) {
    std::vector<Accumulator> acc(method_count);
    for (auto& a : acc) a.sum_error = Vector::Zero(theta.size());
    const std::size_t first = c * kChunk;
    const std::size_t last = std::min(scenario.runs, first + kChunk);
    for (std::size_t b = first; b < last; ++b) {
      const DataSet noisy = add_noise(truth, {scenario.noise.sigma, scenario.noise.seed + b});
      const auto outcomes = fit_all(noisy, methods, options);
      for (std::size_t m = 0; m < method_count; ++m) {
        auto& a = acc[m];
        ++a.attempted;
        const auto& result = outcomes[m].result;
        if (!result) continue;
        a.seconds += result->elapsed_seconds;
        a.max_residual = std::max(a.max_residual, result->relative_residual);
        if (!result->valid) continue;
        Vector estimate = result->theta.vector();
        if (estimate.dot(theta) < 0.0) estimate = -estimate;
        const Vector err = estimate - theta;
        a.sum_error += err;
        a.sum_sq += err.squaredNorm();
        ++a.valid;
      }
    }
    chunks[c] = std::move(acc);
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunk_count));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chunk_count; c = next++) {
          try {
            run_chunk(c);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  // Reduce in chunk order so the result is independent of scheduling.
  std::vector<Accumulator> total(method_count);
  for (auto& a : total) a.sum_error = Vector::Zero(theta.size());
  for (const auto& chunk : chunks) {
    for (std::size_t m = 0; m < method_count; ++m) total[m].merge(chunk[m]);
  }

  MetricsReport report;
  report.sigma = scenario.noise.sigma;
  report.normalized = scenario.noise.sigma > 0.0;
  const double norm = report.normalized ? scenario.noise.sigma * scenario.noise.sigma : 1.0;
  bool any_valid = false;
  for (std::size_t m = 0; m < method_count; ++m) {
    const auto& a = total[m];
    MethodMetrics out;
    out.method = methods[m];
    out.runs_attempted = a.attempted;
    out.runs_used = a.valid;
    out.convergence_rate = 100.0 * static_cast<double>(a.valid) / static_cast<double>(a.attempted);
    out.art_seconds = a.seconds / static_cast<double>(a.attempted);
    out.max_relative_residual = a.max_residual;
    if (a.valid > 0) {
      any_valid = true;
      const double n = static_cast<double>(a.valid);
      out.mean_error = a.sum_error / n;
      out.nmse = a.sum_sq / (norm * n);
      out.nb = out.mean_error.norm() / norm;
    } else {
      out.mean_error = Vector::Constant(theta.size(), std::nan(""));
      out.nmse = std::nan("");
      out.nb = std::nan("");
    }
    report.methods.push_back(std::move(out));
  }
  if (!any_valid && method_count > 0) throw AllRunsFailed("no method returned a valid fit");
  return report;
}

std::map<std::string, Scenario> experiment_presets() {
  std::map<std::string, Scenario> out;

  Scenario exp1;
  exp1.name = "exp1";
  exp1.geometry = {-3.0, 3.0, {{5.0, 1.0}, {10.0, 2.0}}, 0.0};
  exp1.arc_start = 0.0;
  exp1.arc_end = 5.0 * kPi / 3.0;
  exp1.counts = {10, 15};
  exp1.noise = {0.1, 1};
  out["exp1"] = exp1;

  Scenario exp2;
  exp2.name = "exp2";
  exp2.geometry = {0.0, 0.0, {{3.0, 2.0}, {6.0, 4.0}}, 0.0};
  exp2.arc_start = 0.0;
  exp2.arc_end = kPi / 2.0;
  exp2.counts = {15, 20};
  exp2.noise = {0.1, 1};
  out["exp2"] = exp2;

  for (const auto& [name, family] : bias_scan_families()) {
    out[name] = family.at(family.grid[family.grid.size() / 2]);
  }
  return out;
}

std::map<std::string, ScenarioFamily> bias_scan_families() {
  std::map<std::string, ScenarioFamily> out;

  Scenario base;
  base.geometry = {0.0, 0.0, {{3.0, 2.0}, {6.0, 4.0}}, 0.0};
  base.counts = {15, 20};
  base.noise = {0.1, 1};

  ScenarioFamily s1;
  s1.name = "scenario1";
  s1.sweep_variable = "omega";
  s1.grid = linspace(kPi / 4.0, 2.0 * kPi, 15);
  s1.at = [base](double omega) {
    Scenario s = base;
    s.name = "scenario1";
    s.arc_start = 0.0;
    s.arc_end = omega;
    return s;
  };
  out[s1.name] = s1;

  ScenarioFamily s2;
  s2.name = "scenario2";
  s2.sweep_variable = "a1";
  s2.grid = linspace(1.01, 5.0, 15);
  s2.at = [base](double a1) {
    Scenario s = base;
    s.name = "scenario2";
    s.geometry.rings = {{a1, 1.0}, {2.0 * a1, 2.0}};
    s.arc_start = 0.0;
    s.arc_end = kPi / 2.0;
    return s;
  };
  out[s2.name] = s2;

  // Arcs centered on the major-axis vertex (high curvature) or on the
  // minor-axis vertex (low curvature).
  for (const auto& [name, center] : {std::pair{"scenario3-high", 0.0}, std::pair{"scenario3-low", kPi / 2.0}}) {
    ScenarioFamily s3;
    s3.name = name;
    s3.sweep_variable = "omega";
    s3.grid = linspace(kPi / 4.0, kPi, 13);
    s3.at = [base, center, n = std::string(name)](double omega) {
      Scenario s = base;
      s.name = n;
      s.geometry.rings = {{3.0, 1.0}, {6.0, 2.0}};
      s.arc_start = center - omega / 2.0;
      s.arc_end = center + omega / 2.0;
      return s;
    };
    out[s3.name] = s3;
  }
  return out;
}

}  // namespace concentric
