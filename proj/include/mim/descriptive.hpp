#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mim/pattern.hpp"

namespace mim {

/**
 * Binned mark connection functions: for every distance bin, the fraction of
 * point pairs in the bin whose unordered mark pair is {q, r}. Pairs with
 * distance above `d_max` are ignored. Bins are half-open [lo, hi) except the
 * last, which also holds d == d_max.
 */
struct McfEstimate {
  int num_marks = 0;
  double d_max = 0.0;
  std::vector<double> bin_edges;                 // n_bins + 1
  std::vector<std::pair<int, int>> mark_pairs;   // (q, r) with q <= r
  std::vector<std::size_t> totals;               // pairs per bin
  std::vector<std::vector<std::size_t>> counts;  // [bin][mark pair]
  std::vector<std::vector<double>> values;       // [bin][mark pair], NaN if bin empty

  std::size_t num_bins() const { return totals.size(); }
  double bin_mid(std::size_t b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }
  bool defined(std::size_t b) const { return totals[b] > 0; }
  std::size_t pair_index(int q, int r) const;
};

/// Bin index used by `mcf` for a pair at distance d <= d_max.
std::size_t mcf_bin(double d, double d_max, std::size_t n_bins);

McfEstimate mcf(const PointPattern& pattern, double d_max = 0.3, int n_bins = 60);

struct ThresholdSuggestion {
  double c = 0.1;
  bool converged = false;
  bool capped = false;
  /// First bin of the settled region (meaningful when converged).
  std::size_t bin = 0;
  /// Pair-weighted mean of each curve over the tail window.
  std::vector<double> tail_means;
  /// Per bin: largest excess of |value - tail mean| over the allowed band
  /// (<= 0 means inside the band; NaN for empty bins).
  std::vector<double> excess;
};

/**
 * Suggests an interaction threshold from where the MCF curves flatten.
 *
 * The tail window is the upper half of [0, d_max]. A bin is inside the band
 * when every curve is within `tolerance` plus three binomial standard errors
 * of its tail mean. The suggestion is the midpoint of the first bin after
 * which every non-empty bin stays inside the band, capped at `cap`. When the
 * curves only settle inside the tail window, `cap` is returned with
 * `converged == false`.
 */
ThresholdSuggestion suggest_c(const McfEstimate& estimate, double tolerance = 0.02,
                              double cap = 0.1);

}  // namespace mim
