#pragma once

#include <span>
#include <vector>

#include "mim/graph.hpp"
#include "mim/pattern.hpp"

namespace mim {

/**
 * Parameters of the Gibbs energy: first-order intensities omega (length Q),
 * symmetric second-order intensities theta (Q x Q) and decay rate lambda.
 *
 * The identified model fixes omega[Q-1] = 1 and theta[Q-1][Q-1] = 1; the
 * sampler only proposes the remaining entries. The container itself does not
 * enforce the reference values so shifted parameter sets can be evaluated
 * (see `satisfies_reference_constraint`).
 */
class ModelParams {
 public:
  /// Reference configuration: every omega and theta entry 1, lambda 0.
  explicit ModelParams(int num_marks);
  /// `theta` is row-major Q x Q and must be symmetric.
  ModelParams(std::vector<double> omega, std::vector<double> theta, double lambda);

  int num_marks() const { return num_marks_; }

  double omega(int q) const { return omega_[static_cast<std::size_t>(q)]; }
  std::span<const double> omega() const { return omega_; }
  void set_omega(int q, double value) { omega_[static_cast<std::size_t>(q)] = value; }

  double theta(int q, int r) const { return theta_[index(q, r)]; }
  /// Row-major Q x Q view.
  std::span<const double> theta() const { return theta_; }
  /// Sets both (q, r) and (r, q).
  void set_theta(int q, int r, double value) {
    theta_[index(q, r)] = value;
    theta_[index(r, q)] = value;
  }

  double lambda() const { return lambda_; }
  void set_lambda(double value);

  bool satisfies_reference_constraint() const;

  /// Adds `s` to every omega entry.
  ModelParams shift_omega(double s) const;
  /// Adds `s` to every theta entry.
  ModelParams shift_theta(double s) const;

 private:
  std::size_t index(int q, int r) const {
    return static_cast<std::size_t>(q) * static_cast<std::size_t>(num_marks_) +
           static_cast<std::size_t>(r);
  }

  int num_marks_ = 0;
  std::vector<double> omega_;
  std::vector<double> theta_;
  double lambda_ = 0.0;
};

/// Decay weights exp(-lambda d) for one value of lambda, aligned with the
/// graph's edge list and flat adjacency.
class DecayWeights {
 public:
  DecayWeights(const InteractionGraph& graph, double lambda);

  double lambda() const { return lambda_; }
  std::span<const double> edges() const { return edge_; }
  std::span<const double> adjacency() const { return adjacency_; }

 private:
  double lambda_ = 0.0;
  std::vector<double> edge_;
  std::vector<double> adjacency_;
};

/**
 * Sufficient statistics of a mark configuration: per-mark counts and the
 * decay-weighted edge sums per unordered mark pair. The energy is linear in
 * these, so a proposal that leaves lambda unchanged can reuse them.
 */
struct MarkStatistics {
  int num_marks = 0;
  std::vector<double> counts;        // length Q
  std::vector<double> pair_weights;  // row-major Q x Q, only q <= r filled
};

MarkStatistics mark_statistics(const InteractionGraph& graph,
                               const DecayWeights& weights,
                               std::span<const Mark> marks, int num_marks);

double potential_energy(const MarkStatistics& stats, const ModelParams& params);

/// V(z) = sum_q omega_q N_q + sum over edges theta_{z_i z_j} exp(-lambda d_ij),
/// each unordered edge counted once.
double potential_energy(const InteractionGraph& graph, std::span<const Mark> marks,
                        const ModelParams& params);
double potential_energy(const PointPattern& pattern, const InteractionGraph& graph,
                        const ModelParams& params);

/// -V(z). The partition function is not included.
double log_unnormalized_likelihood(const PointPattern& pattern,
                                   const InteractionGraph& graph,
                                   const ModelParams& params);
double log_unnormalized_likelihood(const InteractionGraph& graph,
                                   std::span<const Mark> marks,
                                   const ModelParams& params);

/**
 * Unnormalized log probabilities of each mark for point i with every other
 * mark held fixed: out[q] = -omega_q - sum_r theta_{qr} W_r, where W_r is the
 * decay-weighted number of neighbors with mark r. `scratch` needs Q entries.
 */
void conditional_log_weights(const InteractionGraph& graph,
                             const DecayWeights& weights,
                             std::span<const Mark> marks,
                             const ModelParams& params, std::size_t i,
                             std::span<double> out, std::span<double> scratch);

/// Normalized full conditional of point i (0-based).
std::vector<double> local_conditional(const InteractionGraph& graph,
                                      std::span<const Mark> marks,
                                      const ModelParams& params, std::size_t i);
std::vector<double> local_conditional(const PointPattern& pattern,
                                      const InteractionGraph& graph,
                                      const ModelParams& params, std::size_t i);

/// log sum_z exp(-V(z)) by enumerating all Q^n configurations. For tests
/// only: throws std::length_error when Q^n exceeds 10^7.
double exact_log_normalizing_constant(const InteractionGraph& graph,
                                      const ModelParams& params);
double exact_log_normalizing_constant(const PointPattern& pattern,
                                      const InteractionGraph& graph,
                                      const ModelParams& params);

/// Maximum state-space size accepted by exact_log_normalizing_constant.
inline constexpr double kMaxEnumeratedStates = 1e7;

/// In place: replace log weights by probabilities (max-subtracted softmax).
void softmax_in_place(std::span<double> values);

}  // namespace mim
