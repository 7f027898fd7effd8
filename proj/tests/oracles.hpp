#pragma once

// Test-only reference implementations. Everything here goes the slow,
// obvious way and shares no code path with the library routine it checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <tuple>
#include <vector>

#include "mim/dmh.hpp"
#include "mim/energy.hpp"
#include "mim/graph.hpp"
#include "mim/pattern.hpp"

namespace mim::oracle {

/// All pairs i < j with distance <= c, by double loop.
inline std::vector<Edge> brute_force_pairs(std::span<const Point> points, double c) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double dx = points[i].x - points[j].x;
      const double dy = points[i].y - points[j].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d <= c) edges.push_back({i, j, d});
    }
  }
  return edges;
}

inline bool same_edges(std::span<const Edge> a, std::span<const Edge> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].i != b[k].i || a[k].j != b[k].j || a[k].distance != b[k].distance) return false;
  }
  return true;
}

/// Energy straight from the definition: first-order sum plus a double loop
/// over point pairs within c.
inline double brute_force_energy(std::span<const Point> points, std::span<const Mark> marks,
                                 double c, const ModelParams& params) {
  double v = 0.0;
  for (Mark m : marks) v += params.omega(m);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      if (d <= c) v += params.theta(marks[i], marks[j]) * std::exp(-params.lambda() * d);
    }
  }
  return v;
}

/// Encodes a mark vector as a base-Q integer (z[0] least significant).
inline std::size_t state_index(std::span<const Mark> z, int q_count) {
  std::size_t index = 0;
  for (std::size_t k = z.size(); k-- > 0;) index = index * static_cast<std::size_t>(q_count) + static_cast<std::size_t>(z[k]);
  return index;
}

inline std::vector<Mark> state_marks(std::size_t index, std::size_t n, int q_count) {
  std::vector<Mark> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    z[k] = static_cast<Mark>(index % static_cast<std::size_t>(q_count));
    index /= static_cast<std::size_t>(q_count);
  }
  return z;
}

/// Exact Gibbs measure exp(-V) / C over all Q^n states, indexed by state_index.
inline std::vector<double> exact_distribution(const InteractionGraph& graph,
                                              const ModelParams& params) {
  const std::size_t n = graph.num_points();
  const int q_count = params.num_marks();
  const double log_c = exact_log_normalizing_constant(graph, params);
  std::size_t states = 1;
  for (std::size_t k = 0; k < n; ++k) states *= static_cast<std::size_t>(q_count);
  std::vector<double> p(states);
  for (std::size_t s = 0; s < states; ++s) {
    p[s] = std::exp(-potential_energy(graph, state_marks(s, n, q_count), params) - log_c);
  }
  return p;
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  double tv = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) tv += std::abs(p[k] - q[k]);
  return 0.5 * tv;
}

/// Batch-means Monte Carlo standard error of the mean of a correlated series.
inline double batch_means_se(std::span<const double> x, std::size_t batches = 50) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = std::accumulate(x.begin() + static_cast<std::ptrdiff_t>(b * len),
                               x.begin() + static_cast<std::ptrdiff_t>((b + 1) * len), 0.0) /
               static_cast<double>(len);
  }
  const double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double v : means) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

inline double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double sd(std::span<const double> x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

/// Batch-means standard error of the sample standard deviation.
inline double batch_sd_se(std::span<const double> x, std::size_t batches = 50) {
  const std::size_t len = x.size() / batches;
  std::vector<double> sds(batches);
  for (std::size_t b = 0; b < batches; ++b) sds[b] = sd(x.subspan(b * len, len));
  return sd(sds) / std::sqrt(static_cast<double>(batches));
}

/**
 * Metropolis-Hastings on the exact posterior: the likelihood includes the
 * enumerated normalizing constant, so no auxiliary variables are needed.
 * Same proposals and priors as the double Metropolis-Hastings sampler.
 * Returns draws[parameter][iteration] in ParameterLayout order.
 */
inline std::vector<std::vector<double>> exact_likelihood_mh(
    const InteractionGraph& graph, std::span<const Mark> observed, int q_count,
    const Priors& priors, const ProposalScales& scales, ModelParams current,
    std::size_t iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ParameterLayout layout(q_count);

  const auto log_lik = [&](const ModelParams& p) {
    return -potential_energy(graph, observed, p) - exact_log_normalizing_constant(graph, p);
  };
  const auto log_norm = [](double x, double m, double s) {
    return -0.5 * (x - m) * (x - m) / (s * s);
  };
  const auto log_gamma = [](double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
  };

  double current_ll = log_lik(current);
  std::vector<std::vector<double>> draws(layout.size(), std::vector<double>(iterations));
  for (std::size_t t = 0; t < iterations; ++t) {
    for (int q = 0; q + 1 < q_count; ++q) {
      ModelParams prop = current;
      prop.set_omega(q, current.omega(q) + scales.tau_omega * normal(rng));
      const double ll = log_lik(prop);
      const double log_r = ll - current_ll + log_norm(prop.omega(q), priors.mu_omega, priors.sigma_omega) -
                           log_norm(current.omega(q), priors.mu_omega, priors.sigma_omega);
      if (std::log(unit(rng)) < log_r) {
        current = prop;
        current_ll = ll;
      }
    }
    for (int q = 0; q + 1 < q_count; ++q) {
      for (int r = q; r < q_count; ++r) {
        ModelParams prop = current;
        prop.set_theta(q, r, current.theta(q, r) + scales.tau_theta * normal(rng));
        const double ll = log_lik(prop);
        const double log_r = ll - current_ll +
                             log_norm(prop.theta(q, r), priors.mu_theta, priors.sigma_theta) -
                             log_norm(current.theta(q, r), priors.mu_theta, priors.sigma_theta);
        if (std::log(unit(rng)) < log_r) {
          current = prop;
          current_ll = ll;
        }
      }
    }
    {
      const double lam = current.lambda();
      const double tau = scales.tau_lambda;
      const double proposed =
          std::gamma_distribution<double>(lam * lam / tau, tau / lam)(rng);
      if (proposed > kLambdaFloor) {
        ModelParams prop = current;
        prop.set_lambda(proposed);
        const double ll = log_lik(prop);
        const double log_r = ll - current_ll + log_gamma(proposed, priors.a_lambda, priors.b_lambda) -
                             log_gamma(lam, priors.a_lambda, priors.b_lambda) +
                             log_gamma(lam, proposed * proposed / tau, proposed / tau) -
                             log_gamma(proposed, lam * lam / tau, lam / tau);
        if (std::log(unit(rng)) < log_r) {
          current = prop;
          current_ll = ll;
        }
      }
    }
    const auto flat = layout.flatten(current);
    for (std::size_t p = 0; p < flat.size(); ++p) draws[p][t] = flat[p];
  }
  return draws;
}

/// Equal-tailed quantile by the textbook type-7 formula on a sorted copy.
inline double type7_quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
}

}  // namespace mim::oracle
