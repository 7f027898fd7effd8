#include "mim/dmh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mim {

void Priors::validate() const {
  if (!(sigma_omega > 0.0)) throw std::invalid_argument("sigma_omega must be > 0");
  if (!(sigma_theta > 0.0)) throw std::invalid_argument("sigma_theta must be > 0");
  if (!(a_lambda > 0.0)) throw std::invalid_argument("a_lambda must be > 0");
  if (!(b_lambda > 0.0)) throw std::invalid_argument("b_lambda must be > 0");
}

void ProposalScales::validate() const {
  if (!(tau_omega > 0.0)) throw std::invalid_argument("tau_omega must be > 0");
  if (!(tau_theta > 0.0)) throw std::invalid_argument("tau_theta must be > 0");
  if (!(tau_lambda > 0.0)) throw std::invalid_argument("tau_lambda must be > 0");
}

void McmcConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(burn_in_fraction > 0.0 && burn_in_fraction < 1.0)) {
    throw std::invalid_argument("burn-in fraction must lie in (0, 1)");
  }
  if (aux_sweeps < 1) throw std::invalid_argument("aux_sweeps must be >= 1");
  if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
}

std::size_t McmcConfig::burn_in() const {
  return static_cast<std::size_t>(std::floor(burn_in_fraction * static_cast<double>(iterations)));
}

ParameterLayout::ParameterLayout(int num_marks) : num_marks_(num_marks) {
  if (num_marks < 2) throw std::invalid_argument("parameter layout needs Q >= 2");
  for (int q = 0; q + 1 < num_marks; ++q) names_.push_back("omega_" + std::to_string(q + 1));
  for (int q = 0; q < num_marks; ++q) {
    for (int r = q; r < num_marks; ++r) {
      if (q == num_marks - 1 && r == num_marks - 1) continue;
      names_.push_back("theta_" + std::to_string(q + 1) + "_" + std::to_string(r + 1));
    }
  }
  names_.emplace_back("lambda");
}

std::size_t ParameterLayout::omega_index(int q) const {
  if (q < 0 || q >= num_marks_ - 1) throw std::out_of_range("omega index is fixed or out of range");
  return static_cast<std::size_t>(q);
}

std::size_t ParameterLayout::theta_index(int q, int r) const {
  if (q > r) std::swap(q, r);
  if (q < 0 || r >= num_marks_ || q == num_marks_ - 1) {
    throw std::out_of_range("theta index is fixed or out of range");
  }
  // Rows 0..q-1 contribute Q, Q-1, ... entries each.
  const auto big_q = static_cast<std::size_t>(num_marks_);
  const auto uq = static_cast<std::size_t>(q);
  const std::size_t before = uq * big_q - uq * (uq - 1) / 2;
  return big_q - 1 + before + static_cast<std::size_t>(r - q);
}

std::size_t ParameterLayout::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw std::out_of_range("unknown parameter '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<double> ParameterLayout::flatten(const ModelParams& params) const {
  std::vector<double> values(size());
  for (int q = 0; q + 1 < num_marks_; ++q) values[omega_index(q)] = params.omega(q);
  for (int q = 0; q + 1 < num_marks_; ++q) {
    for (int r = q; r < num_marks_; ++r) values[theta_index(q, r)] = params.theta(q, r);
  }
  values[lambda_index()] = params.lambda();
  return values;
}

ModelParams ParameterLayout::unflatten(std::span<const double> values) const {
  if (values.size() != size()) throw std::invalid_argument("wrong number of parameter values");
  ModelParams params(num_marks_);
  for (int q = 0; q + 1 < num_marks_; ++q) params.set_omega(q, values[omega_index(q)]);
  for (int q = 0; q + 1 < num_marks_; ++q) {
    for (int r = q; r < num_marks_; ++r) params.set_theta(q, r, values[theta_index(q, r)]);
  }
  params.set_lambda(values[lambda_index()]);
  return params;
}

double PosteriorSamples::acceptance_rate(std::size_t chain, std::size_t parameter) const {
  return iterations == 0 ? 0.0
                         : static_cast<double>(chains[chain].accepted[parameter]) /
                               static_cast<double>(iterations);
}

double log_normal_density(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

DmhSampler::DmhSampler(const InteractionGraph& graph, std::span<const Mark> observed,
                       ModelParams initial, Priors priors, ProposalScales scales,
                       int aux_sweeps, ScanOrder aux_scan)
    : graph_(graph),
      observed_(observed),
      params_(std::move(initial)),
      priors_(priors),
      scales_(scales),
      aux_sweeps_(aux_sweeps),
      aux_scan_(aux_scan),
      weights_(graph, params_.lambda()),
      observed_stats_(mark_statistics(graph, weights_, observed, params_.num_marks())),
      aux_(observed.begin(), observed.end()) {
  priors_.validate();
  scales_.validate();
  if (observed.size() != graph.num_points()) {
    throw std::invalid_argument("observed marks and graph sizes differ");
  }
  if (aux_sweeps < 1) throw std::invalid_argument("aux_sweeps must be >= 1");
  if (!params_.satisfies_reference_constraint()) {
    throw std::invalid_argument("initial parameters must fix omega_Q = theta_QQ = 1");
  }
}

bool DmhSampler::accept(const ModelParams& proposal, const DecayWeights& proposal_weights,
                        double log_extra, Rng& rng) {
  std::copy(observed_.begin(), observed_.end(), aux_.begin());
  for (int s = 0; s < aux_sweeps_; ++s) {
    gibbs_sweep(graph_, proposal_weights, proposal, aux_, rng, aux_scan_);
  }
  const int q_count = params_.num_marks();
  const bool lambda_moved = proposal.lambda() != params_.lambda();

  const auto aux_current = mark_statistics(graph_, weights_, aux_, q_count);
  double log_r = -potential_energy(aux_current, params_) +
                 potential_energy(observed_stats_, params_) + log_extra;
  MarkStatistics observed_proposed;
  if (lambda_moved) {
    observed_proposed = mark_statistics(graph_, proposal_weights, observed_, q_count);
    const auto aux_proposed = mark_statistics(graph_, proposal_weights, aux_, q_count);
    log_r += -potential_energy(observed_proposed, proposal) +
             potential_energy(aux_proposed, proposal);
  } else {
    log_r += -potential_energy(observed_stats_, proposal) +
             potential_energy(aux_current, proposal);
  }

  if (!(std::log(uniform01(rng)) < log_r)) return false;
  params_ = proposal;
  if (lambda_moved) {
    weights_ = proposal_weights;
    observed_stats_ = std::move(observed_proposed);
  }
  return true;
}

bool DmhSampler::update_omega(int q, Rng& rng) {
  if (q < 0 || q >= params_.num_marks() - 1) throw std::out_of_range("omega_Q is fixed");
  const double current = params_.omega(q);
  const double proposed = std::normal_distribution<double>(current, scales_.tau_omega)(rng);
  ModelParams proposal = params_;
  proposal.set_omega(q, proposed);
  const double log_prior = log_normal_density(proposed, priors_.mu_omega, priors_.sigma_omega) -
                           log_normal_density(current, priors_.mu_omega, priors_.sigma_omega);
  return accept(proposal, weights_, log_prior, rng);
}

bool DmhSampler::update_theta(int q, int r, Rng& rng) {
  if (q > r) std::swap(q, r);
  const int last = params_.num_marks() - 1;
  if (q < 0 || r > last || q == last) throw std::out_of_range("theta_QQ is fixed");
  const double current = params_.theta(q, r);
  const double proposed = std::normal_distribution<double>(current, scales_.tau_theta)(rng);
  ModelParams proposal = params_;
  proposal.set_theta(q, r, proposed);
  const double log_prior = log_normal_density(proposed, priors_.mu_theta, priors_.sigma_theta) -
                           log_normal_density(current, priors_.mu_theta, priors_.sigma_theta);
  return accept(proposal, weights_, log_prior, rng);
}

bool DmhSampler::update_lambda(Rng& rng) {
  const double current = params_.lambda();
  const double tau = scales_.tau_lambda;
  // Gamma with mean `current` and variance tau.
  const double shape = current * current / tau;
  const double rate = current / tau;
  const double proposed = std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
  if (!(proposed > kLambdaFloor) || !std::isfinite(proposed)) return false;

  const double log_prior = log_gamma_density(proposed, priors_.a_lambda, priors_.b_lambda) -
                           log_gamma_density(current, priors_.a_lambda, priors_.b_lambda);
  const double log_proposal =
      log_gamma_density(current, proposed * proposed / tau, proposed / tau) -
      log_gamma_density(proposed, shape, rate);
  ModelParams proposal = params_;
  proposal.set_lambda(proposed);
  return accept(proposal, DecayWeights(graph_, proposed), log_prior + log_proposal, rng);
}

ModelParams draw_initial_params(int num_marks, const Priors& priors, Rng& rng) {
  ModelParams params(num_marks);
  std::normal_distribution<double> omega(priors.mu_omega, priors.sigma_omega);
  std::normal_distribution<double> theta(priors.mu_theta, priors.sigma_theta);
  for (int q = 0; q + 1 < num_marks; ++q) params.set_omega(q, omega(rng));
  for (int q = 0; q + 1 < num_marks; ++q) {
    for (int r = q; r < num_marks; ++r) params.set_theta(q, r, theta(rng));
  }
  const double lambda =
      std::gamma_distribution<double>(priors.a_lambda, 1.0 / priors.b_lambda)(rng);
  params.set_lambda(std::clamp(std::isfinite(lambda) ? lambda : kLambdaInitMax,
                               kLambdaInitMin, kLambdaInitMax));
  return params;
}

namespace {

ChainSamples run_single_chain(const InteractionGraph& graph, std::span<const Mark> observed,
                              int num_marks, const Priors& priors,
                              const ProposalScales& scales, const McmcConfig& config,
                              std::uint64_t stream) {
  auto rng = make_rng(config.seed, stream);
  const ParameterLayout layout(num_marks);
  DmhSampler sampler(graph, observed, draw_initial_params(num_marks, priors, rng), priors,
                     scales, config.aux_sweeps, config.aux_scan);

  ChainSamples out;
  out.draws.assign(layout.size(), std::vector<double>(config.iterations));
  out.accepted.assign(layout.size(), 0);
  for (std::size_t t = 0; t < config.iterations; ++t) {
    for (int q = 0; q + 1 < num_marks; ++q) {
      out.accepted[layout.omega_index(q)] += sampler.update_omega(q, rng) ? 1 : 0;
    }
    for (int q = 0; q + 1 < num_marks; ++q) {
      for (int r = q; r < num_marks; ++r) {
        out.accepted[layout.theta_index(q, r)] += sampler.update_theta(q, r, rng) ? 1 : 0;
      }
    }
    out.accepted[layout.lambda_index()] += sampler.update_lambda(rng) ? 1 : 0;

    const auto values = layout.flatten(sampler.params());
    for (std::size_t p = 0; p < values.size(); ++p) out.draws[p][t] = values[p];
  }
  return out;
}

}  // namespace

PosteriorSamples run_chain(const InteractionGraph& graph, std::span<const Mark> observed,
                           int num_marks, const Priors& priors,
                           const ProposalScales& scales, const McmcConfig& config) {
  config.validate();
  priors.validate();
  scales.validate();

  PosteriorSamples samples;
  samples.num_marks = num_marks;
  samples.iterations = config.iterations;
  samples.burn_in = config.burn_in();
  samples.chains.resize(static_cast<std::size_t>(config.n_chains));

  std::vector<std::exception_ptr> errors(samples.chains.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < samples.chains.size(); ++k) {
      workers.emplace_back([&, k] {
        try {
          samples.chains[k] =
              run_single_chain(graph, observed, num_marks, priors, scales, config, k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return samples;
}

PosteriorSamples run_chain(const PointPattern& pattern, const InteractionGraph& graph,
                           const Priors& priors, const ProposalScales& scales,
                           const McmcConfig& config) {
  if (pattern.size() != graph.num_points()) {
    throw std::invalid_argument("pattern and graph sizes differ");
  }
  return run_chain(graph, pattern.marks(), pattern.num_marks(), priors, scales, config);
}

void write_samples_csv(const PosteriorSamples& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto names = samples.layout().names();
  out << "chain,iteration,parameter,value\n";
  char buf[64];
  for (std::size_t k = 0; k < samples.num_chains(); ++k) {
    for (std::size_t t = 0; t < samples.iterations; ++t) {
      for (std::size_t p = 0; p < names.size(); ++p) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), samples.chains[k].draws[p][t]);
        out << k << ',' << t << ',' << names[p] << ',' << std::string_view(buf, ptr) << '\n';
      }
    }
  }
}

PosteriorSamples read_samples_csv(const std::filesystem::path& path, double burn_in_fraction) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("chain,iteration,parameter,value", 0) != 0) {
    throw std::runtime_error(path.string() + ":1: expected header chain,iteration,parameter,value");
  }
  struct Row {
    std::size_t chain, iteration;
    std::string name;
    double value;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  int omega_count = 0;
  std::size_t max_chain = 0, max_iteration = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string chain, iteration, name, value;
    if (!std::getline(ss, chain, ',') || !std::getline(ss, iteration, ',') ||
        !std::getline(ss, name, ',') || !std::getline(ss, value)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    Row row{};
    try {
      row.chain = std::stoul(chain);
      row.iteration = std::stoul(iteration);
      row.value = std::stod(value);
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    row.name = name;
    if (row.chain == 0 && row.iteration == 0 && name.rfind("omega_", 0) == 0) ++omega_count;
    max_chain = std::max(max_chain, row.chain);
    max_iteration = std::max(max_iteration, row.iteration);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(path.string() + ": no samples");

  PosteriorSamples samples;
  samples.num_marks = omega_count + 1;
  samples.iterations = max_iteration + 1;
  samples.burn_in = static_cast<std::size_t>(
      std::floor(burn_in_fraction * static_cast<double>(samples.iterations)));
  const auto layout = samples.layout();
  samples.chains.resize(max_chain + 1);
  for (auto& c : samples.chains) {
    c.draws.assign(layout.size(), std::vector<double>(samples.iterations,
                                                      std::numeric_limits<double>::quiet_NaN()));
    c.accepted.assign(layout.size(), 0);
  }
  for (const auto& row : rows) {
    samples.chains[row.chain].draws[layout.index_of(row.name)][row.iteration] = row.value;
  }
  for (const auto& c : samples.chains) {
    for (const auto& d : c.draws) {
      if (std::any_of(d.begin(), d.end(), [](double v) { return std::isnan(v); })) {
        throw std::runtime_error(path.string() + ": incomplete sample matrix");
      }
    }
  }
  return samples;
}

}  // namespace mim
