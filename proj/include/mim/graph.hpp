#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mim/pattern.hpp"

namespace mim {

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double distance = 0.0;
};

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/**
 * Thresholded interaction network: every unordered pair of points whose
 * Euclidean distance is at most `threshold()`.
 *
 * Edges are sorted by (i, j). The adjacency lists are the symmetric closure
 * of the edge list, each sorted by neighbor index. Distances are stored once;
 * decay weights depend on the current decay rate and are computed by callers.
 */
class InteractionGraph {
 public:
  InteractionGraph() = default;
  InteractionGraph(std::size_t num_points, double threshold,
                   std::vector<Edge> edges);

  std::size_t num_points() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  double threshold() const { return threshold_; }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Neighbor> neighbors(std::size_t i) const {
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Flat adjacency storage; neighbors(i) is the slice
  /// [adjacency_offset(i), adjacency_offset(i + 1)).
  std::span<const Neighbor> adjacency() const { return adjacency_; }
  std::size_t adjacency_offset(std::size_t i) const { return offsets_[i]; }

 private:
  double threshold_ = 0.0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Pairs with distance <= threshold, found with a uniform bucket grid.
/// Throws std::invalid_argument when threshold <= 0 or not finite.
std::vector<Edge> pairs_within(std::span<const Point> points, double threshold);

InteractionGraph build_graph(std::span<const Point> points, double threshold);
InteractionGraph build_graph(const PointPattern& pattern, double threshold);

}  // namespace mim
