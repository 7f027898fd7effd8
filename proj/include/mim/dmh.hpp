#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mim/energy.hpp"
#include "mim/graph.hpp"
#include "mim/pattern.hpp"
#include "mim/rng.hpp"
#include "mim/simulate.hpp"

namespace mim {

/// Proposals at or below this decay rate are rejected outright.
inline constexpr double kLambdaFloor = 1e-6;
/// Range that a prior draw of the initial decay rate is clamped to.
inline constexpr double kLambdaInitMin = 1.0;
inline constexpr double kLambdaInitMax = 1e3;

/// Normal priors on the free omega and theta entries, gamma (shape, rate)
/// prior on lambda.
struct Priors {
  double mu_omega = 1.0;
  double sigma_omega = 1.0;
  double mu_theta = 0.0;
  double sigma_theta = 1.0;
  double a_lambda = 0.001;
  double b_lambda = 0.001;

  void validate() const;
};

/// tau_omega and tau_theta are random-walk standard deviations; tau_lambda
/// is the variance of the gamma proposal centred on the current lambda.
struct ProposalScales {
  double tau_omega = 0.1;
  double tau_theta = 0.1;
  double tau_lambda = 25.0;

  void validate() const;
};

struct McmcConfig {
  /// One iteration updates every free omega, every free theta, then lambda.
  std::size_t iterations = 50000;
  double burn_in_fraction = 0.5;
  /// Gibbs sweeps used to draw each auxiliary mark configuration.
  int aux_sweeps = 1;
  int n_chains = 1;
  std::uint64_t seed = 1;
  ScanOrder aux_scan = ScanOrder::systematic;

  void validate() const;
  std::size_t burn_in() const;
};

/**
 * Order of the free parameters in every sample matrix:
 * omega_1..omega_{Q-1}, theta_{q,r} for q <= r in row order excluding
 * (Q, Q), then lambda. Names use 1-based mark indices.
 */
class ParameterLayout {
 public:
  explicit ParameterLayout(int num_marks);

  int num_marks() const { return num_marks_; }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  std::size_t omega_index(int q) const;
  std::size_t theta_index(int q, int r) const;
  std::size_t lambda_index() const { return names_.size() - 1; }
  /// Throws std::out_of_range for unknown names.
  std::size_t index_of(std::string_view name) const;

  /// Free entries of `params` in layout order.
  std::vector<double> flatten(const ModelParams& params) const;
  /// Inverse of flatten; fixed entries are set to 1.
  ModelParams unflatten(std::span<const double> values) const;

 private:
  int num_marks_;
  std::vector<std::string> names_;
};

struct ChainSamples {
  /// draws[p][t]: parameter p (layout order) at iteration t.
  std::vector<std::vector<double>> draws;
  /// Accepted proposals per parameter.
  std::vector<std::size_t> accepted;
};

struct PosteriorSamples {
  int num_marks = 0;
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  std::vector<ChainSamples> chains;

  ParameterLayout layout() const { return ParameterLayout(num_marks); }
  std::size_t num_chains() const { return chains.size(); }
  std::span<const double> draws(std::size_t chain, std::size_t parameter) const {
    return chains[chain].draws[parameter];
  }
  /// Draws after burn-in.
  std::span<const double> kept(std::size_t chain, std::size_t parameter) const {
    return draws(chain, parameter).subspan(burn_in);
  }
  double acceptance_rate(std::size_t chain, std::size_t parameter) const;
};

/**
 * Double Metropolis-Hastings state for one chain.
 *
 * Each update proposes one free parameter, draws auxiliary marks by
 * `aux_sweeps` Gibbs sweeps started from the observed marks under the
 * proposed parameters, and accepts with
 *
 *   log r = -V(z*|p) + V(z|p) - V(z|p*) + V(z*|p*) + log prior ratio
 *           + log proposal ratio,
 *
 * in which the partition functions of p and p* cancel. The observed marks
 * and the graph are borrowed and must outlive the sampler.
 */
class DmhSampler {
 public:
  DmhSampler(const InteractionGraph& graph, std::span<const Mark> observed,
             ModelParams initial, Priors priors, ProposalScales scales,
             int aux_sweeps = 1, ScanOrder aux_scan = ScanOrder::systematic);

  const ModelParams& params() const { return params_; }

  /// q in 0..Q-2.
  bool update_omega(int q, Rng& rng);
  /// q <= r, (q, r) != (Q-1, Q-1).
  bool update_theta(int q, int r, Rng& rng);
  bool update_lambda(Rng& rng);

  /// Marks of the most recent auxiliary draw.
  std::span<const Mark> auxiliary() const { return aux_; }

 private:
  bool accept(const ModelParams& proposal, const DecayWeights& proposal_weights,
              double log_extra, Rng& rng);

  const InteractionGraph& graph_;
  std::span<const Mark> observed_;
  ModelParams params_;
  Priors priors_;
  ProposalScales scales_;
  int aux_sweeps_;
  ScanOrder aux_scan_;
  DecayWeights weights_;
  MarkStatistics observed_stats_;
  std::vector<Mark> aux_;
};

/// Free parameters drawn from their priors; lambda clamped to
/// [kLambdaInitMin, kLambdaInitMax].
ModelParams draw_initial_params(int num_marks, const Priors& priors, Rng& rng);

double log_normal_density(double x, double mean, double sd);
/// Gamma density with shape/rate parameterization.
double log_gamma_density(double x, double shape, double rate);

/// Runs config.n_chains independent chains in parallel. Chain k uses the RNG
/// stream (config.seed, k).
PosteriorSamples run_chain(const PointPattern& pattern, const InteractionGraph& graph,
                           const Priors& priors, const ProposalScales& scales,
                           const McmcConfig& config);
PosteriorSamples run_chain(const InteractionGraph& graph, std::span<const Mark> observed,
                           int num_marks, const Priors& priors,
                           const ProposalScales& scales, const McmcConfig& config);

/// Long format: chain,iteration,parameter,value (0-based chain and iteration).
void write_samples_csv(const PosteriorSamples& samples, const std::filesystem::path& path);
/// Q is inferred from the omega parameters; burn_in is set from the fraction.
PosteriorSamples read_samples_csv(const std::filesystem::path& path,
                                  double burn_in_fraction = 0.5);

}  // namespace mim
