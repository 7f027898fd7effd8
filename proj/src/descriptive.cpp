#include "mim/descriptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mim/graph.hpp"

namespace mim {

std::size_t McfEstimate::pair_index(int q, int r) const {
  if (q > r) std::swap(q, r);
  const auto it = std::find(mark_pairs.begin(), mark_pairs.end(), std::pair{q, r});
  if (it == mark_pairs.end()) throw std::out_of_range("mark pair out of range");
  return static_cast<std::size_t>(it - mark_pairs.begin());
}

std::size_t mcf_bin(double d, double d_max, std::size_t n_bins) {
  const double width = d_max / static_cast<double>(n_bins);
  return std::min(n_bins - 1, static_cast<std::size_t>(d / width));
}

McfEstimate mcf(const PointPattern& pattern, double d_max, int n_bins) {
  if (!(d_max > 0.0)) throw std::invalid_argument("MCF d_max must be > 0");
  if (n_bins < 1) throw std::invalid_argument("MCF needs at least one bin");
  const auto bins = static_cast<std::size_t>(n_bins);

  McfEstimate est;
  est.num_marks = pattern.num_marks();
  est.d_max = d_max;
  for (std::size_t b = 0; b <= bins; ++b) {
    est.bin_edges.push_back(d_max * static_cast<double>(b) / static_cast<double>(bins));
  }
  for (int q = 0; q < est.num_marks; ++q) {
    for (int r = q; r < est.num_marks; ++r) est.mark_pairs.emplace_back(q, r);
  }
  const auto q_count = static_cast<std::size_t>(est.num_marks);
  // Lookup from ordered (q, r) to the unordered pair slot.
  std::vector<std::size_t> slot(q_count * q_count);
  for (std::size_t p = 0; p < est.mark_pairs.size(); ++p) {
    const auto [q, r] = est.mark_pairs[p];
    slot[static_cast<std::size_t>(q) * q_count + static_cast<std::size_t>(r)] = p;
    slot[static_cast<std::size_t>(r) * q_count + static_cast<std::size_t>(q)] = p;
  }

  est.totals.assign(bins, 0);
  est.counts.assign(bins, std::vector<std::size_t>(est.mark_pairs.size(), 0));
  for (const auto& e : pairs_within(pattern.points(), d_max)) {
    const auto b = mcf_bin(e.distance, d_max, bins);
    const auto q = static_cast<std::size_t>(pattern.mark(e.i));
    const auto r = static_cast<std::size_t>(pattern.mark(e.j));
    ++est.totals[b];
    ++est.counts[b][slot[q * q_count + r]];
  }
  est.values.assign(bins, std::vector<double>(est.mark_pairs.size(),
                                              std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t b = 0; b < bins; ++b) {
    if (est.totals[b] == 0) continue;
    for (std::size_t p = 0; p < est.mark_pairs.size(); ++p) {
      est.values[b][p] =
          static_cast<double>(est.counts[b][p]) / static_cast<double>(est.totals[b]);
    }
  }
  return est;
}

ThresholdSuggestion suggest_c(const McfEstimate& est, double tolerance, double cap) {
  const std::size_t bins = est.num_bins();
  const std::size_t pairs = est.mark_pairs.size();
  ThresholdSuggestion out;
  out.c = cap;
  out.excess.assign(bins, std::numeric_limits<double>::quiet_NaN());

  std::size_t tail_start = bins;
  for (std::size_t b = 0; b < bins; ++b) {
    if (est.bin_mid(b) >= 0.5 * est.d_max) {
      tail_start = b;
      break;
    }
  }
  std::vector<double> tail_counts(pairs, 0.0);
  double tail_total = 0.0;
  for (std::size_t b = tail_start; b < bins; ++b) {
    tail_total += static_cast<double>(est.totals[b]);
    for (std::size_t p = 0; p < pairs; ++p) {
      tail_counts[p] += static_cast<double>(est.counts[b][p]);
    }
  }
  if (tail_total == 0.0) return out;
  out.tail_means.resize(pairs);
  for (std::size_t p = 0; p < pairs; ++p) out.tail_means[p] = tail_counts[p] / tail_total;

  constexpr double kStandardErrors = 3.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (!est.defined(b)) continue;
    const double total = static_cast<double>(est.totals[b]);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < pairs; ++p) {
      const double m = out.tail_means[p];
      const double band = tolerance + kStandardErrors * std::sqrt(m * (1.0 - m) / total);
      worst = std::max(worst, std::abs(est.values[b][p] - m) - band);
    }
    out.excess[b] = worst;
  }

  // Smallest k such that every defined bin >= k is inside the band.
  std::size_t settled = bins;
  for (std::size_t b = bins; b-- > 0;) {
    if (est.defined(b) && out.excess[b] > 0.0) break;
    settled = b;
  }
  // Leading empty bins carry no evidence against flatness.
  while (settled < bins && !est.defined(settled)) ++settled;
  if (settled >= tail_start) return out;

  out.converged = true;
  out.bin = settled;
  const double mid = est.bin_mid(settled);
  out.capped = mid > cap;
  out.c = std::min(mid, cap);
  return out;
}

}  // namespace mim
