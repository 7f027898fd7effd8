#include <random>

#include "doctest.h"
#include "mim/graph.hpp"
#include "oracles.hpp"

using namespace mim;

namespace {

std::vector<Point> uniform_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

}  // namespace

TEST_CASE("two points closer than c share one edge") {
  const std::vector<Point> pts{{0.2, 0.2}, {0.25, 0.2}};
  const auto g = build_graph(pts, 0.1);
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edges()[0].distance == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("two points farther than c share no edge") {
  const std::vector<Point> pts{{0.2, 0.2}, {0.35, 0.2}};
  CHECK(build_graph(pts, 0.1).edges().empty());
}

TEST_CASE("grid index matches the brute-force pair filter") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto pts = uniform_points(100, seed);
    for (double c : {0.01, 0.05, 0.2, 1.0}) {
      const auto fast = pairs_within(pts, c);
      const auto slow = oracle::brute_force_pairs(pts, c);
      CHECK(oracle::same_edges(fast, slow));
    }
  }
}

TEST_CASE("clustered and duplicated points are handled") {
  std::vector<Point> pts(30, Point{0.5, 0.5});
  pts.push_back({0.0, 0.0});
  pts.push_back({1.0, 1.0});
  const auto fast = pairs_within(pts, 0.05);
  CHECK(oracle::same_edges(fast, oracle::brute_force_pairs(pts, 0.05)));
  CHECK(fast.size() == 30 * 29 / 2);
}

TEST_CASE("adjacency is the symmetric closure of the edge list") {
  const auto pts = uniform_points(200, 42);
  const auto g = build_graph(pts, 0.08);
  std::size_t total = 0;
  for (std::size_t i = 0; i < g.num_points(); ++i) {
    for (const auto& nb : g.neighbors(i)) {
      CHECK(nb.index != i);
      const auto a = std::min(i, nb.index);
      const auto b = std::max(i, nb.index);
      const bool found = std::any_of(g.edges().begin(), g.edges().end(), [&](const Edge& e) {
        return e.i == a && e.j == b && e.distance == nb.distance;
      });
      CHECK(found);
    }
    total += g.neighbors(i).size();
  }
  CHECK(total == 2 * g.edges().size());
  for (const auto& e : g.edges()) {
    CHECK(e.i < e.j);
    CHECK(e.distance <= 0.08);
  }
}

TEST_CASE("invalid thresholds are rejected") {
  const auto pts = uniform_points(10, 1);
  CHECK_THROWS(build_graph(pts, 0.0));
  CHECK_THROWS(build_graph(pts, -1.0));
  CHECK_THROWS(build_graph(pts, NAN));
}
