#include "mim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mim {

InteractionGraph::InteractionGraph(std::size_t num_points, double threshold,
                                   std::vector<Edge> edges)
    : threshold_(threshold), edges_(std::move(edges)) {
  const auto by_pair = [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  };
  if (!std::is_sorted(edges_.begin(), edges_.end(), by_pair)) {
    std::sort(edges_.begin(), edges_.end(), by_pair);
  }
  offsets_.assign(num_points + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.i + 1];
    ++offsets_[e.j + 1];
  }
  for (std::size_t i = 0; i < num_points; ++i) offsets_[i + 1] += offsets_[i];

  adjacency_.resize(offsets_.back());
  auto cursor = offsets_;
  // Edges are sorted by (i, j): the first pass appends the lower neighbors of
  // every point in increasing order, the second the higher ones.
  for (const auto& e : edges_) adjacency_[cursor[e.j]++] = {e.i, e.distance};
  for (const auto& e : edges_) adjacency_[cursor[e.i]++] = {e.j, e.distance};
}

std::vector<Edge> pairs_within(std::span<const Point> points, double threshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("interaction threshold must be positive and finite");
  }
  const std::size_t n = points.size();
  std::vector<Edge> edges;
  if (n < 2) return edges;

  double min_x = points[0].x, max_x = points[0].x;
  double min_y = points[0].y, max_y = points[0].y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }

  // Cell side is never below the threshold, so a 3x3 block of cells covers
  // every candidate. The cell count per axis is capped to keep the table
  // proportional to n when the threshold is tiny.
  const double extent = std::max(max_x - min_x, max_y - min_y);
  const auto max_cells =
      static_cast<double>(std::max<std::size_t>(1, 2 * static_cast<std::size_t>(std::sqrt(n))));
  const double cell = std::max(threshold, extent / max_cells);
  const auto nx = static_cast<std::size_t>((max_x - min_x) / cell) + 1;
  const auto ny = static_cast<std::size_t>((max_y - min_y) / cell) + 1;

  const auto cell_of = [&](const Point& p) {
    const auto cx = std::min(nx - 1, static_cast<std::size_t>((p.x - min_x) / cell));
    const auto cy = std::min(ny - 1, static_cast<std::size_t>((p.y - min_y) / cell));
    return std::pair{cx, cy};
  };

  // Counting sort of point indices by cell.
  std::vector<std::size_t> start(nx * ny + 1, 0);
  std::vector<std::size_t> cell_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(points[i]);
    cell_index[i] = cy * nx + cx;
    ++start[cell_index[i] + 1];
  }
  for (std::size_t c = 0; c < nx * ny; ++c) start[c + 1] += start[c];
  std::vector<std::size_t> members(n);
  {
    auto cursor = start;
    for (std::size_t i = 0; i < n; ++i) members[cursor[cell_index[i]]++] = i;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(points[i]);
    const std::size_t x0 = cx == 0 ? 0 : cx - 1, x1 = std::min(nx - 1, cx + 1);
    const std::size_t y0 = cy == 0 ? 0 : cy - 1, y1 = std::min(ny - 1, cy + 1);
    for (std::size_t y = y0; y <= y1; ++y) {
      for (std::size_t x = x0; x <= x1; ++x) {
        const std::size_t c = y * nx + x;
        for (std::size_t k = start[c]; k < start[c + 1]; ++k) {
          const std::size_t j = members[k];
          if (j <= i) continue;
          const double dx = points[i].x - points[j].x;
          const double dy = points[i].y - points[j].y;
          const double d = std::sqrt(dx * dx + dy * dy);
          if (d <= threshold) edges.push_back({i, j, d});
        }
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return edges;
}

InteractionGraph build_graph(std::span<const Point> points, double threshold) {
  return InteractionGraph(points.size(), threshold, pairs_within(points, threshold));
}

InteractionGraph build_graph(const PointPattern& pattern, double threshold) {
  return build_graph(pattern.points(), threshold);
}

}  // namespace mim
