#include "mim/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mim {

ModelParams::ModelParams(int num_marks)
    : num_marks_(num_marks),
      omega_(static_cast<std::size_t>(std::max(num_marks, 0)), 1.0),
      theta_(static_cast<std::size_t>(std::max(num_marks, 0)) *
                 static_cast<std::size_t>(std::max(num_marks, 0)),
             1.0) {
  if (num_marks < 2) throw std::invalid_argument("model needs Q >= 2 marks");
}

ModelParams::ModelParams(std::vector<double> omega, std::vector<double> theta,
                         double lambda)
    : num_marks_(static_cast<int>(omega.size())),
      omega_(std::move(omega)),
      theta_(std::move(theta)) {
  if (num_marks_ < 2) throw std::invalid_argument("model needs Q >= 2 marks");
  if (theta_.size() != omega_.size() * omega_.size()) {
    throw std::invalid_argument("theta must be Q x Q");
  }
  for (int q = 0; q < num_marks_; ++q) {
    for (int r = q + 1; r < num_marks_; ++r) {
      if (theta_[index(q, r)] != theta_[index(r, q)]) {
        throw std::invalid_argument("theta must be symmetric");
      }
    }
  }
  set_lambda(lambda);
}

void ModelParams::set_lambda(double value) {
  if (!(value >= 0.0)) {
    throw std::invalid_argument("decay rate lambda must be >= 0");
  }
  lambda_ = value;
}

bool ModelParams::satisfies_reference_constraint() const {
  const int last = num_marks_ - 1;
  return omega(last) == 1.0 && theta(last, last) == 1.0;
}

ModelParams ModelParams::shift_omega(double s) const {
  ModelParams shifted = *this;
  for (auto& w : shifted.omega_) w += s;
  return shifted;
}

ModelParams ModelParams::shift_theta(double s) const {
  ModelParams shifted = *this;
  for (auto& t : shifted.theta_) t += s;
  return shifted;
}

DecayWeights::DecayWeights(const InteractionGraph& graph, double lambda)
    : lambda_(lambda) {
  const auto edges = graph.edges();
  edge_.resize(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    edge_[k] = std::exp(-lambda * edges[k].distance);
  }
  const auto adjacency = graph.adjacency();
  adjacency_.resize(adjacency.size());
  for (std::size_t k = 0; k < adjacency.size(); ++k) {
    adjacency_[k] = std::exp(-lambda * adjacency[k].distance);
  }
}

MarkStatistics mark_statistics(const InteractionGraph& graph,
                               const DecayWeights& weights,
                               std::span<const Mark> marks, int num_marks) {
  const auto q_count = static_cast<std::size_t>(num_marks);
  MarkStatistics stats{num_marks, std::vector<double>(q_count, 0.0),
                       std::vector<double>(q_count * q_count, 0.0)};
  for (Mark m : marks) stats.counts[static_cast<std::size_t>(m)] += 1.0;
  const auto edges = graph.edges();
  const auto w = weights.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    auto a = static_cast<std::size_t>(marks[edges[k].i]);
    auto b = static_cast<std::size_t>(marks[edges[k].j]);
    if (a > b) std::swap(a, b);
    stats.pair_weights[a * q_count + b] += w[k];
  }
  return stats;
}

double potential_energy(const MarkStatistics& stats, const ModelParams& params) {
  const int q_count = stats.num_marks;
  double energy = 0.0;
  for (int q = 0; q < q_count; ++q) {
    energy += params.omega(q) * stats.counts[static_cast<std::size_t>(q)];
  }
  for (int q = 0; q < q_count; ++q) {
    for (int r = q; r < q_count; ++r) {
      energy += params.theta(q, r) *
                stats.pair_weights[static_cast<std::size_t>(q * q_count + r)];
    }
  }
  return energy;
}

double potential_energy(const InteractionGraph& graph, std::span<const Mark> marks,
                        const ModelParams& params) {
  const DecayWeights weights(graph, params.lambda());
  return potential_energy(
      mark_statistics(graph, weights, marks, params.num_marks()), params);
}

double potential_energy(const PointPattern& pattern, const InteractionGraph& graph,
                        const ModelParams& params) {
  return potential_energy(graph, pattern.marks(), params);
}

double log_unnormalized_likelihood(const PointPattern& pattern,
                                   const InteractionGraph& graph,
                                   const ModelParams& params) {
  return -potential_energy(pattern, graph, params);
}

double log_unnormalized_likelihood(const InteractionGraph& graph,
                                   std::span<const Mark> marks,
                                   const ModelParams& params) {
  return -potential_energy(graph, marks, params);
}

void conditional_log_weights(const InteractionGraph& graph,
                             const DecayWeights& weights,
                             std::span<const Mark> marks,
                             const ModelParams& params, std::size_t i,
                             std::span<double> out, std::span<double> scratch) {
  const int q_count = params.num_marks();
  std::fill(scratch.begin(), scratch.begin() + q_count, 0.0);
  const std::size_t begin = graph.adjacency_offset(i);
  const std::size_t end = graph.adjacency_offset(i + 1);
  const auto adjacency = graph.adjacency();
  const auto w = weights.adjacency();
  for (std::size_t k = begin; k < end; ++k) {
    scratch[static_cast<std::size_t>(marks[adjacency[k].index])] += w[k];
  }
  const auto theta = params.theta();
  for (int q = 0; q < q_count; ++q) {
    double e = params.omega(q);
    const double* row = theta.data() + static_cast<std::size_t>(q * q_count);
    for (int r = 0; r < q_count; ++r) e += row[r] * scratch[static_cast<std::size_t>(r)];
    out[static_cast<std::size_t>(q)] = -e;
  }
}

void softmax_in_place(std::span<double> values) {
  const double max = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (auto& v : values) {
    v = std::exp(v - max);
    total += v;
  }
  for (auto& v : values) v /= total;
}

std::vector<double> local_conditional(const InteractionGraph& graph,
                                      std::span<const Mark> marks,
                                      const ModelParams& params, std::size_t i) {
  if (i >= graph.num_points()) {
    throw std::out_of_range("point index " + std::to_string(i) + " out of range");
  }
  const auto q_count = static_cast<std::size_t>(params.num_marks());
  std::vector<double> probs(q_count), scratch(q_count);
  const DecayWeights weights(graph, params.lambda());
  conditional_log_weights(graph, weights, marks, params, i, probs, scratch);
  softmax_in_place(probs);
  return probs;
}

std::vector<double> local_conditional(const PointPattern& pattern,
                                      const InteractionGraph& graph,
                                      const ModelParams& params, std::size_t i) {
  return local_conditional(graph, pattern.marks(), params, i);
}

double exact_log_normalizing_constant(const InteractionGraph& graph,
                                      const ModelParams& params) {
  const std::size_t n = graph.num_points();
  const int q_count = params.num_marks();
  const double states = std::pow(static_cast<double>(q_count), static_cast<double>(n));
  if (states > kMaxEnumeratedStates) {
    throw std::length_error("exact normalizing constant needs Q^n <= 1e7 states, got " +
                            std::to_string(states));
  }
  const DecayWeights weights(graph, params.lambda());
  std::vector<Mark> z(n, 0);
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(states));
  while (true) {
    log_terms.push_back(
        -potential_energy(mark_statistics(graph, weights, z, q_count), params));
    // Mixed-radix increment.
    std::size_t k = 0;
    while (k < n && ++z[k] == q_count) z[k++] = 0;
    if (k == n) break;
  }
  const double max = *std::max_element(log_terms.begin(), log_terms.end());
  double total = 0.0;
  for (double t : log_terms) total += std::exp(t - max);
  return max + std::log(total);
}

double exact_log_normalizing_constant(const PointPattern& pattern,
                                      const InteractionGraph& graph,
                                      const ModelParams& params) {
  if (pattern.size() != graph.num_points()) {
    throw std::invalid_argument("pattern and graph sizes differ");
  }
  return exact_log_normalizing_constant(graph, params);
}

}  // namespace mim
