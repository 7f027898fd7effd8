#include "mim/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mim {

ModelParams posterior_mean(const PosteriorSamples& samples) {
  return posterior_mean(samples, samples.burn_in);
}

ModelParams posterior_mean(const PosteriorSamples& samples, std::size_t burn_in) {
  if (burn_in >= samples.iterations || samples.chains.empty()) {
    throw std::invalid_argument("no draws left after burn-in");
  }
  const auto layout = samples.layout();
  std::vector<double> means(layout.size(), 0.0);
  for (std::size_t p = 0; p < layout.size(); ++p) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < samples.num_chains(); ++k) {
      const auto draws = samples.draws(k, p).subspan(burn_in);
      total = std::accumulate(draws.begin(), draws.end(), total);
      count += draws.size();
    }
    means[p] = total / static_cast<double>(count);
  }
  return layout.unflatten(means);
}

std::vector<double> transform_pi(std::span<const double> omega) {
  std::vector<double> pi(omega.size());
  std::transform(omega.begin(), omega.end(), pi.begin(), [](double w) { return -w; });
  softmax_in_place(pi);
  return pi;
}

SquareMatrix transform_phi(std::span<const double> theta, int num_marks) {
  const auto q_count = static_cast<std::size_t>(num_marks);
  if (theta.size() != q_count * q_count) throw std::invalid_argument("theta must be Q x Q");
  SquareMatrix phi(num_marks);
  std::vector<double> column(q_count);
  for (int r = 0; r < num_marks; ++r) {
    for (int q = 0; q < num_marks; ++q) {
      column[static_cast<std::size_t>(q)] = -theta[static_cast<std::size_t>(q) * q_count +
                                                   static_cast<std::size_t>(r)];
    }
    softmax_in_place(column);
    for (int q = 0; q < num_marks; ++q) phi(q, r) = column[static_cast<std::size_t>(q)];
  }
  return phi;
}

SquareMatrix transform_phi(const ModelParams& params) {
  return transform_phi(params.theta(), params.num_marks());
}

std::vector<double> mif_curve(const ModelParams& params, int q, int r,
                              std::span<const double> distances) {
  const int q_count = params.num_marks();
  if (q < 0 || q >= q_count || r < 0 || r >= q_count) {
    throw std::out_of_range("MIF mark index out of range");
  }
  std::vector<double> curve;
  curve.reserve(distances.size());
  std::vector<double> logits(static_cast<std::size_t>(q_count));
  for (double d : distances) {
    if (!(d >= 0.0)) throw std::invalid_argument("MIF distances must be >= 0");
    const double w = std::exp(-params.lambda() * d);
    for (int s = 0; s < q_count; ++s) {
      logits[static_cast<std::size_t>(s)] = -params.omega(s) - params.theta(s, r) * w;
    }
    softmax_in_place(logits);
    curve.push_back(logits[static_cast<std::size_t>(q)]);
  }
  return curve;
}

std::vector<double> default_mif_grid() {
  constexpr int kPoints = 200;
  constexpr double kMax = 0.3;
  std::vector<double> grid(kPoints);
  for (int k = 0; k < kPoints; ++k) grid[static_cast<std::size_t>(k)] = kMax * k / (kPoints - 1);
  return grid;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Interval credible_interval(std::span<const double> values, double level) {
  if (values.size() < 100) {
    throw std::invalid_argument("credible interval needs at least 100 post-burn-in draws, got " +
                                std::to_string(values.size()));
  }
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - level);
  std::vector<double> copy(values.begin(), values.end());
  return {quantile(copy, tail), quantile(std::move(copy), 1.0 - tail)};
}

namespace {

std::vector<double> pooled(const PosteriorSamples& samples, std::size_t parameter) {
  std::vector<double> values;
  for (std::size_t k = 0; k < samples.num_chains(); ++k) {
    const auto kept = samples.kept(k, parameter);
    values.insert(values.end(), kept.begin(), kept.end());
  }
  return values;
}

// Calls fn(params) for every kept draw of every chain.
template <typename Fn>
void for_each_kept_draw(const PosteriorSamples& samples, Fn&& fn) {
  const auto layout = samples.layout();
  std::vector<double> values(layout.size());
  for (std::size_t k = 0; k < samples.num_chains(); ++k) {
    for (std::size_t t = samples.burn_in; t < samples.iterations; ++t) {
      for (std::size_t p = 0; p < layout.size(); ++p) values[p] = samples.chains[k].draws[p][t];
      fn(layout.unflatten(values));
    }
  }
}

}  // namespace

Interval credible_interval(const PosteriorSamples& samples, std::size_t parameter,
                           double level) {
  return credible_interval(pooled(samples, parameter), level);
}

Interval credible_interval(const PosteriorSamples& samples,
                           const std::function<double(const ModelParams&)>& transform,
                           double level) {
  std::vector<double> values;
  for_each_kept_draw(samples, [&](const ModelParams& p) { values.push_back(transform(p)); });
  return credible_interval(values, level);
}

double gelman_rubin(std::span<const std::span<const double>> chains) {
  const std::size_t m = chains.size();
  if (m < 2) {
    throw std::invalid_argument(
        "Gelman-Rubin diagnostic needs at least 2 chains; rerun with more chains");
  }
  const std::size_t n = chains.front().size();
  if (n < 10) throw std::invalid_argument("Gelman-Rubin diagnostic needs >= 10 draws per chain");
  for (const auto& c : chains) {
    if (c.size() != n) throw std::invalid_argument("chains must have equal length");
  }
  const double nd = static_cast<double>(n);
  std::vector<double> means(m), variances(m);
  for (std::size_t k = 0; k < m; ++k) {
    means[k] = std::accumulate(chains[k].begin(), chains[k].end(), 0.0) / nd;
    double ss = 0.0;
    for (double v : chains[k]) ss += (v - means[k]) * (v - means[k]);
    variances[k] = ss / (nd - 1.0);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(m);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= nd / (static_cast<double>(m) - 1.0);
  const double within = std::accumulate(variances.begin(), variances.end(), 0.0) /
                        static_cast<double>(m);
  if (!(within > 0.0)) {
    // Every chain constant: agreement iff the constants coincide.
    return between > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return std::sqrt(((nd - 1.0) / nd * within + between / nd) / within);
}

double gelman_rubin(const PosteriorSamples& samples, std::size_t parameter) {
  std::vector<std::span<const double>> chains;
  for (std::size_t k = 0; k < samples.num_chains(); ++k) {
    chains.push_back(samples.kept(k, parameter));
  }
  return gelman_rubin(chains);
}

TransformedSummary summarize(const PosteriorSamples& samples, double level,
                             std::vector<double> mif_grid) {
  TransformedSummary s;
  s.level = level;
  s.estimate = posterior_mean(samples);
  const int q_count = samples.num_marks;
  const auto uq = static_cast<std::size_t>(q_count);
  s.pi = transform_pi(s.estimate.omega());
  s.phi = transform_phi(s.estimate);
  s.lambda_hat = s.estimate.lambda();

  std::vector<std::vector<double>> pi_draws(uq), phi_draws(uq * uq);
  for_each_kept_draw(samples, [&](const ModelParams& p) {
    const auto pi = transform_pi(p.omega());
    const auto phi = transform_phi(p);
    for (std::size_t q = 0; q < uq; ++q) pi_draws[q].push_back(pi[q]);
    for (std::size_t e = 0; e < uq * uq; ++e) phi_draws[e].push_back(phi.values[e]);
  });
  const auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  s.pi_draw_mean.resize(uq);
  s.phi_draw_mean = SquareMatrix(q_count);
  for (std::size_t q = 0; q < uq; ++q) {
    s.pi_draw_mean[q] = mean(pi_draws[q]);
    s.pi_ci.push_back(credible_interval(pi_draws[q], level));
  }
  for (std::size_t e = 0; e < uq * uq; ++e) {
    s.phi_draw_mean.values[e] = mean(phi_draws[e]);
    s.phi_ci.push_back(credible_interval(phi_draws[e], level));
  }
  const auto layout = samples.layout();
  s.lambda_ci = credible_interval(samples, layout.lambda_index(), level);
  if (samples.num_chains() >= 2) {
    for (std::size_t p = 0; p < layout.size(); ++p) s.psrf.push_back(gelman_rubin(samples, p));
  }
  s.mif_grid = std::move(mif_grid);
  for (int q = 0; q < q_count; ++q) {
    for (int r = 0; r < q_count; ++r) {
      s.mif_curves.push_back({q, r, mif_curve(s.estimate, q, r, s.mif_grid)});
    }
  }
  return s;
}

nlohmann::json summary_to_json(const TransformedSummary& s,
                               const std::vector<std::string>& labels) {
  const int q_count = s.estimate.num_marks();
  const auto name = [&](int q) {
    return labels.empty() ? std::to_string(q + 1) : labels[static_cast<std::size_t>(q)];
  };
  nlohmann::json out;
  out["marks"] = nlohmann::json::array();
  for (int q = 0; q < q_count; ++q) out["marks"].push_back(name(q));
  out["level"] = s.level;
  out["lambda_hat"] = s.lambda_hat;
  out["lambda_ci"] = {s.lambda_ci.lower, s.lambda_ci.upper};
  out["omega_hat"] = std::vector<double>(s.estimate.omega().begin(), s.estimate.omega().end());
  nlohmann::json theta = nlohmann::json::array();
  for (int q = 0; q < q_count; ++q) {
    std::vector<double> row;
    for (int r = 0; r < q_count; ++r) row.push_back(s.estimate.theta(q, r));
    theta.push_back(row);
  }
  out["theta_hat"] = theta;

  nlohmann::json pi = nlohmann::json::array();
  for (int q = 0; q < q_count; ++q) {
    const auto uq = static_cast<std::size_t>(q);
    pi.push_back({{"mark", name(q)},
                  {"estimate", s.pi[uq]},
                  {"draw_mean", s.pi_draw_mean[uq]},
                  {"ci", {s.pi_ci[uq].lower, s.pi_ci[uq].upper}}});
  }
  out["pi"] = pi;

  nlohmann::json phi = nlohmann::json::array();
  for (int q = 0; q < q_count; ++q) {
    for (int r = 0; r < q_count; ++r) {
      const auto e = static_cast<std::size_t>(q * q_count + r);
      phi.push_back({{"mark", name(q)},
                     {"given", name(r)},
                     {"estimate", s.phi(q, r)},
                     {"draw_mean", s.phi_draw_mean(q, r)},
                     {"ci", {s.phi_ci[e].lower, s.phi_ci[e].upper}}});
    }
  }
  out["phi"] = phi;
  if (!s.psrf.empty()) {
    const ParameterLayout layout(q_count);
    nlohmann::json psrf;
    for (std::size_t p = 0; p < s.psrf.size(); ++p) psrf[layout.names()[p]] = s.psrf[p];
    out["psrf"] = psrf;
  }
  return out;
}

}  // namespace mim
