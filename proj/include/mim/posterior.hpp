#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mim/dmh.hpp"
#include "mim/energy.hpp"

namespace mim {

/// Dense row-major square matrix of probabilities or parameters.
struct SquareMatrix {
  int size = 0;
  std::vector<double> values;

  explicit SquareMatrix(int n = 0)
      : size(n), values(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}
  double& operator()(int row, int col) { return values[index(row, col)]; }
  double operator()(int row, int col) const { return values[index(row, col)]; }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(size) +
           static_cast<std::size_t>(col);
  }
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Mean of the pooled post-burn-in draws of every chain, as parameters with
/// the fixed reference entries set to 1. Throws when burn-in leaves nothing.
ModelParams posterior_mean(const PosteriorSamples& samples);
ModelParams posterior_mean(const PosteriorSamples& samples, std::size_t burn_in);

/// Mark probabilities of an isolated point: softmax of -omega.
std::vector<double> transform_pi(std::span<const double> omega);

/// Column r is the softmax over q of -theta(q, r): the mark distribution of a
/// point sitting on top of a neighbor with mark r. Not symmetric in general.
SquareMatrix transform_phi(std::span<const double> theta, int num_marks);
SquareMatrix transform_phi(const ModelParams& params);

/// Probability that a point takes mark q given one neighbor of mark r at
/// distance d, for every d in `distances`.
std::vector<double> mif_curve(const ModelParams& params, int q, int r,
                              std::span<const double> distances);

/// 200 evenly spaced distances on [0, 0.3].
std::vector<double> default_mif_grid();

/// Linear interpolation between order statistics (p in [0, 1]).
double quantile(std::vector<double> values, double p);

/// Equal-tailed interval of `values`. Needs at least 100 values.
Interval credible_interval(std::span<const double> values, double level = 0.95);
/// Interval of one free parameter over the pooled kept draws.
Interval credible_interval(const PosteriorSamples& samples, std::size_t parameter,
                           double level = 0.95);
/// Interval of a derived quantity: `transform` is applied to every kept
/// draw, then quantiles are taken.
Interval credible_interval(const PosteriorSamples& samples,
                           const std::function<double(const ModelParams&)>& transform,
                           double level = 0.95);

/// Potential scale reduction factor sqrt(((n-1)/n W + B/n) / W) over
/// equal-length chains. Needs >= 2 chains of >= 10 draws.
double gelman_rubin(std::span<const std::span<const double>> chains);
/// Over the kept draws of one parameter.
double gelman_rubin(const PosteriorSamples& samples, std::size_t parameter);

struct MifCurve {
  int q = 0;
  int r = 0;
  std::vector<double> values;
};

struct TransformedSummary {
  ModelParams estimate{2};
  /// Transforms of the posterior-mean parameters.
  std::vector<double> pi;
  SquareMatrix phi;
  /// Means of the per-draw transforms.
  std::vector<double> pi_draw_mean;
  SquareMatrix phi_draw_mean;
  std::vector<Interval> pi_ci;
  std::vector<Interval> phi_ci;  // row-major Q x Q
  double lambda_hat = 0.0;
  Interval lambda_ci;
  double level = 0.95;
  /// One entry per free parameter; empty when fewer than two chains.
  std::vector<double> psrf;
  std::vector<double> mif_grid;
  std::vector<MifCurve> mif_curves;
};

TransformedSummary summarize(const PosteriorSamples& samples, double level = 0.95,
                             std::vector<double> mif_grid = default_mif_grid());

/// `labels[k]` names internal mark k; when empty, 1-based indices are used.
nlohmann::json summary_to_json(const TransformedSummary& summary,
                               const std::vector<std::string>& labels = {});

}  // namespace mim
