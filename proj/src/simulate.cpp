#include "mim/simulate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace mim {

std::vector<Point> sample_poisson(double eta, Rng& rng) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("Poisson intensity must be positive");
  }
  const auto count = std::poisson_distribution<std::int64_t>(eta)(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> points;
  points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    const double x = unit(rng);
    const double y = unit(rng);
    points.push_back({x, y});
  }
  return points;
}

std::vector<Point> sample_poisson(double eta, std::uint64_t seed) {
  auto rng = make_rng(seed);
  return sample_poisson(eta, rng);
}

void LgcpConfig::validate() const {
  if (grid_resolution < 8) throw std::invalid_argument("LGCP grid_resolution must be >= 8");
  if (!(gp_variance > 0.0)) throw std::invalid_argument("LGCP gp_variance must be > 0");
  if (!(gp_scale > 0.0)) throw std::invalid_argument("LGCP gp_scale must be > 0");
}

double LgcpConfig::base_log_intensity(Point p) const {
  return base_intercept +
         base_slope * (std::abs(p.x - base_center.x) + std::abs(p.y - base_center.y));
}

struct LgcpSampler::Factor {
  Eigen::MatrixXd lower;
};

LgcpSampler::LgcpSampler(LgcpConfig config) : config_(config) {
  config_.validate();
  const auto centers = cell_centers();
  const auto m = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double dx = centers[static_cast<std::size_t>(a)].x - centers[static_cast<std::size_t>(b)].x;
      const double dy = centers[static_cast<std::size_t>(a)].y - centers[static_cast<std::size_t>(b)].y;
      const double r = std::sqrt(dx * dx + dy * dy) / config_.gp_scale;
      const double k = config_.kernel == CovarianceKernel::exponential ? std::exp(-r)
                                                                         : std::exp(-0.5 * r * r);
      cov(a, b) = cov(b, a) = config_.gp_variance * k;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-8;
    llt.compute(cov);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("LGCP covariance is not positive definite even with jitter");
    }
  }
  factor_ = std::make_unique<Factor>(Factor{llt.matrixL()});
}

LgcpSampler::~LgcpSampler() = default;
LgcpSampler::LgcpSampler(LgcpSampler&&) noexcept = default;
LgcpSampler& LgcpSampler::operator=(LgcpSampler&&) noexcept = default;

std::vector<Point> LgcpSampler::cell_centers() const {
  const int g = config_.grid_resolution;
  const double h = 1.0 / g;
  std::vector<Point> centers;
  centers.reserve(static_cast<std::size_t>(g * g));
  for (int iy = 0; iy < g; ++iy) {
    for (int ix = 0; ix < g; ++ix) centers.push_back({(ix + 0.5) * h, (iy + 0.5) * h});
  }
  return centers;
}

std::vector<double> LgcpSampler::sample_field(Rng& rng) const {
  const auto m = factor_->lower.rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(m);
  for (Eigen::Index k = 0; k < m; ++k) z(k) = normal(rng);
  const Eigen::VectorXd field = factor_->lower.triangularView<Eigen::Lower>() * z;
  return {field.data(), field.data() + m};
}

std::vector<Point> LgcpSampler::sample(Rng& rng) const {
  const auto field = sample_field(rng);
  const auto centers = cell_centers();
  const int g = config_.grid_resolution;
  const double h = 1.0 / g;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> points;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double mean = std::exp(config_.base_log_intensity(centers[c]) + field[c]) * h * h;
    const auto count = std::poisson_distribution<std::int64_t>(mean)(rng);
    const double x0 = centers[c].x - 0.5 * h;
    const double y0 = centers[c].y - 0.5 * h;
    for (std::int64_t k = 0; k < count; ++k) {
      const double x = x0 + h * unit(rng);
      const double y = y0 + h * unit(rng);
      points.push_back({x, y});
    }
  }
  return points;
}

std::vector<Point> sample_lgcp(const LgcpConfig& config, std::uint64_t seed) {
  auto rng = make_rng(seed);
  return LgcpSampler(config).sample(rng);
}

void gibbs_sweep(const InteractionGraph& graph, const DecayWeights& weights,
                 const ModelParams& params, std::span<Mark> marks, Rng& rng,
                 ScanOrder order) {
  const std::size_t n = marks.size();
  const auto q_count = static_cast<std::size_t>(params.num_marks());
  std::vector<double> probs(q_count), scratch(q_count);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> site(0, n == 0 ? 0 : n - 1);

  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = order == ScanOrder::systematic ? step : site(rng);
    conditional_log_weights(graph, weights, marks, params, i, probs, scratch);
    softmax_in_place(probs);
    const double u = unit(rng);
    double cumulative = 0.0;
    std::size_t q = 0;
    for (; q + 1 < q_count; ++q) {
      cumulative += probs[q];
      if (u < cumulative) break;
    }
    marks[i] = static_cast<Mark>(q);
  }
}

std::vector<Mark> gibbs_sample_marks(const InteractionGraph& graph,
                                     const ModelParams& params, int sweeps,
                                     std::optional<std::span<const Mark>> init,
                                     std::uint64_t seed, ScanOrder order) {
  if (sweeps < 1) throw std::invalid_argument("Gibbs sampler needs sweeps >= 1");
  const std::size_t n = graph.num_points();
  auto rng = make_rng(seed);
  std::vector<Mark> marks;
  if (init) {
    if (init->size() != n) throw std::invalid_argument("initial marks have the wrong length");
    marks.assign(init->begin(), init->end());
  } else {
    std::uniform_int_distribution<Mark> uniform(0, static_cast<Mark>(params.num_marks() - 1));
    marks.resize(n);
    for (auto& m : marks) m = uniform(rng);
  }
  const DecayWeights weights(graph, params.lambda());
  for (int s = 0; s < sweeps; ++s) gibbs_sweep(graph, weights, params, marks, rng, order);
  return marks;
}

Scenario parse_scenario(std::string_view name) {
  for (auto s : {Scenario::high_attraction, Scenario::low_attraction, Scenario::random,
                 Scenario::low_repulsion, Scenario::high_repulsion}) {
    if (scenario_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::high_attraction: return "high-attraction";
    case Scenario::low_attraction: return "low-attraction";
    case Scenario::random: return "random";
    case Scenario::low_repulsion: return "low-repulsion";
    case Scenario::high_repulsion: return "high-repulsion";
  }
  return "unknown";
}

double scenario_cross_interaction(Scenario s) {
  switch (s) {
    case Scenario::high_attraction: return 3.2;
    case Scenario::low_attraction: return 1.9;
    case Scenario::random: return 1.0;
    case Scenario::low_repulsion: return 0.2;
    case Scenario::high_repulsion: return -1.2;
  }
  return 1.0;
}

ModelParams scenario_params(Scenario s, double lambda) {
  const double cross = scenario_cross_interaction(s);
  return ModelParams({1.0, 1.0}, {1.0, cross, cross, 1.0}, lambda);
}

PointPattern simulate_pattern(const SimulationConfig& config) {
  auto rng = make_rng(config.seed, 0);
  const auto points = config.process == PointProcess::poisson
                          ? sample_poisson(config.eta, rng)
                          : LgcpSampler(config.lgcp).sample(rng);
  if (points.empty()) throw std::runtime_error("simulated point process produced no points");
  const auto graph = build_graph(points, config.threshold);
  const auto params = scenario_params(config.scenario, config.lambda);
  const auto marks = gibbs_sample_marks(graph, params, config.sweeps, std::nullopt,
                                        config.seed + 0x9e3779b97f4a7c15ULL);
  std::vector<std::string> labels;
  labels.reserve(marks.size());
  for (Mark m : marks) labels.push_back(std::to_string(m + 1));
  return make_pattern(points, labels);
}

}  // namespace mim
