#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mim/energy.hpp"
#include "mim/graph.hpp"
#include "mim/pattern.hpp"
#include "mim/rng.hpp"

namespace mim {

// ---------------------------------------------------------------------------
// Point locations
// ---------------------------------------------------------------------------

/// Homogeneous Poisson process on the unit square: N ~ Poisson(eta), then N
/// i.i.d. uniform points. May return an empty list.
std::vector<Point> sample_poisson(double eta, Rng& rng);
std::vector<Point> sample_poisson(double eta, std::uint64_t seed);

enum class CovarianceKernel { exponential, squared_exponential };

/**
 * Log Gaussian Cox process on a regular grid over the unit square.
 *
 * log intensity(x, y) = intercept + slope * (|x - cx| + |y - cy|) + G(x, y)
 * where G is a zero-mean Gaussian field evaluated at cell centers with
 * covariance variance * k(|u - v| / scale).
 */
struct LgcpConfig {
  double base_intercept = 6.0;
  Point base_center{0.3, 0.3};
  double base_slope = 1.0;
  double gp_variance = 1.0;
  double gp_scale = 1.0;
  int grid_resolution = 64;
  CovarianceKernel kernel = CovarianceKernel::exponential;

  void validate() const;
  double base_log_intensity(Point p) const;
};

/// Factorizes the field covariance once; every `sample` call draws a new
/// field and a new point set.
class LgcpSampler {
 public:
  explicit LgcpSampler(LgcpConfig config);
  ~LgcpSampler();
  LgcpSampler(LgcpSampler&&) noexcept;
  LgcpSampler& operator=(LgcpSampler&&) noexcept;

  const LgcpConfig& config() const { return config_; }
  /// Cell centers, row-major with x varying fastest.
  std::vector<Point> cell_centers() const;
  /// One field realization (log-scale, zero mean) at the cell centers.
  std::vector<double> sample_field(Rng& rng) const;
  std::vector<Point> sample(Rng& rng) const;

 private:
  struct Factor;
  LgcpConfig config_;
  std::unique_ptr<Factor> factor_;
};

std::vector<Point> sample_lgcp(const LgcpConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Marks
// ---------------------------------------------------------------------------

enum class ScanOrder { systematic, random };

/// One sweep of single-site Gibbs updates from the full conditionals. A
/// systematic sweep visits 0..n-1 in order; a random sweep makes n uniformly
/// chosen site updates.
void gibbs_sweep(const InteractionGraph& graph, const DecayWeights& weights,
                 const ModelParams& params, std::span<Mark> marks, Rng& rng,
                 ScanOrder order = ScanOrder::systematic);

/// Runs `sweeps` full sweeps from `init`, or from uniformly random marks when
/// `init` is empty. Deterministic given the seed.
std::vector<Mark> gibbs_sample_marks(const InteractionGraph& graph,
                                     const ModelParams& params, int sweeps,
                                     std::optional<std::span<const Mark>> init,
                                     std::uint64_t seed,
                                     ScanOrder order = ScanOrder::systematic);

// ---------------------------------------------------------------------------
// Two-type benchmark scenarios
// ---------------------------------------------------------------------------

enum class Scenario {
  high_attraction,
  low_attraction,
  random,
  low_repulsion,
  high_repulsion,
};

Scenario parse_scenario(std::string_view name);
std::string_view scenario_name(Scenario s);
/// theta_12 of the scenario; theta_11 = theta_22 = 1.
double scenario_cross_interaction(Scenario s);
/// Q = 2, omega = (1, 1), scenario theta, given lambda.
ModelParams scenario_params(Scenario s, double lambda);

enum class PointProcess { poisson, lgcp };

struct SimulationConfig {
  PointProcess process = PointProcess::poisson;
  double eta = 2000.0;
  LgcpConfig lgcp{};
  Scenario scenario = Scenario::high_attraction;
  double lambda = 60.0;
  double threshold = 0.05;
  /// Full Gibbs sweeps over all points (one sweep = n single-site updates).
  int sweeps = 50;
  std::uint64_t seed = 1;
};

/// Locations from the configured process, marks from a Gibbs run started at
/// uniformly random marks. Labels are "1" and "2" for the scenario's marks.
PointPattern simulate_pattern(const SimulationConfig& config);

}  // namespace mim
