#include <random>

#include "doctest.h"
#include "mim/posterior.hpp"
#include "oracles.hpp"

using namespace mim;

namespace {

// Q = 2 samples where every parameter in chain k follows fill(k, t).
template <typename Fn>
PosteriorSamples synthetic(std::size_t chains, std::size_t iterations, std::size_t burn_in, Fn fill) {
  PosteriorSamples s;
  s.num_marks = 2;
  s.iterations = iterations;
  s.burn_in = burn_in;
  const auto size = s.layout().size();
  for (std::size_t k = 0; k < chains; ++k) {
    ChainSamples c;
    c.draws.assign(size, std::vector<double>(iterations));
    c.accepted.assign(size, 0);
    for (std::size_t p = 0; p < size; ++p) {
      for (std::size_t t = 0; t < iterations; ++t) c.draws[p][t] = fill(k, p, t);
    }
    s.chains.push_back(std::move(c));
  }
  return s;
}

}  // namespace

TEST_CASE("posterior mean of constant and pooled chains") {
  const auto constant = synthetic(1, 200, 100, [](auto, auto, auto) { return 0.75; });
  const auto est = posterior_mean(constant);
  CHECK(est.omega(0) == 0.75);
  CHECK(est.theta(0, 1) == 0.75);
  CHECK(est.omega(1) == 1.0);
  const auto two = synthetic(2, 200, 100, [](auto k, auto, auto) { return k == 0 ? 2.0 : 5.0; });
  CHECK(posterior_mean(two).omega(0) == doctest::Approx(3.5));
  CHECK_THROWS(posterior_mean(two, 200));
}

TEST_CASE("transform_pi reproduces reported first-order estimates") {
  const auto even = transform_pi(std::vector<double>{1.0, 1.0});
  CHECK(even[0] == doctest::Approx(0.5));
  const auto lansing = transform_pi(std::vector<double>{2.514, 1.315, 1.654, 3.104, 2.016, 1.0});
  const std::vector<double> expected{0.074, 0.247, 0.176, 0.041, 0.123, 0.339};
  for (std::size_t q = 0; q < 6; ++q) CHECK(std::abs(lansing[q] - expected[q]) < 0.001);
  const auto amacrine = transform_pi(std::vector<double>{0.85, 1.0});
  CHECK(std::abs(amacrine[0] - 0.538) < 0.001);
  CHECK(std::abs(amacrine[1] - 0.462) < 0.001);
}

TEST_CASE("transform_phi reproduces the attraction and repulsion tables") {
  const auto high = transform_phi(std::vector<double>{1, 3.2, 3.2, 1}, 2);
  CHECK(std::abs(high(0, 0) - 0.9) < 0.01);
  CHECK(std::abs(high(0, 1) - 0.1) < 0.01);
  const auto rep = transform_phi(std::vector<double>{1, -1.2, -1.2, 1}, 2);
  CHECK(std::abs(rep(0, 0) - 0.1) < 0.01);
  CHECK(std::abs(rep(1, 0) - 0.9) < 0.01);
  const auto ama = transform_phi(std::vector<double>{0.35, -4.024, -4.024, 1.0}, 2);
  CHECK(std::abs(ama(0, 0) - 0.012) < 0.002);
  CHECK(std::abs(ama(1, 0) - 0.988) < 0.002);
}

TEST_CASE("transforms are shift invariant and columns sum to one") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> omega{z(rng), z(rng), z(rng), 1.0};
    std::vector<double> theta(16);
    for (int q = 0; q < 4; ++q) {
      for (int r = q; r < 4; ++r) theta[q * 4 + r] = theta[r * 4 + q] = z(rng);
    }
    const double s = z(rng);
    auto omega2 = omega;
    auto theta2 = theta;
    for (auto& v : omega2) v += s;
    for (auto& v : theta2) v += s;
    const auto pi = transform_pi(omega);
    const auto pi2 = transform_pi(omega2);
    const auto phi = transform_phi(theta, 4);
    const auto phi2 = transform_phi(theta2, 4);
    for (int q = 0; q < 4; ++q) CHECK(std::abs(pi[q] - pi2[q]) <= 1e-12);
    for (int r = 0; r < 4; ++r) {
      double col = 0.0;
      for (int q = 0; q < 4; ++q) {
        col += phi(q, r);
        CHECK(std::abs(phi(q, r) - phi2(q, r)) <= 1e-12);
      }
      CHECK(std::abs(col - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("MIF limits") {
  ModelParams p({0.4, 1.0}, {0.2, -1.5, -1.5, 1.0}, 30.0);
  const std::vector<double> far{40.0 / 30.0, 5.0};
  const auto pi = transform_pi(p.omega());
  for (int q = 0; q < 2; ++q) {
    for (double v : mif_curve(p, q, 1, far)) CHECK(std::abs(v - pi[q]) <= 1e-12);
  }
  ModelParams even({1.0, 1.0}, {0.2, -1.5, -1.5, 1.0}, 30.0);
  const auto phi = transform_phi(even);
  const std::vector<double> zero{0.0};
  CHECK(mif_curve(even, 0, 1, zero)[0] == doctest::Approx(phi(0, 1)).epsilon(1e-12));
  CHECK(mif_curve(even, 1, 0, zero)[0] == doctest::Approx(phi(1, 0)).epsilon(1e-12));
  p.set_lambda(0.0);
  const auto flat = mif_curve(p, 0, 0, default_mif_grid());
  for (double v : flat) CHECK(v == doctest::Approx(flat.front()).epsilon(1e-14));
  const auto grid = default_mif_grid();
  CHECK(grid.size() == 200);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(0.3));
}

TEST_CASE("quantiles and credible intervals") {
  std::vector<double> seq(1000);
  for (int k = 0; k < 1000; ++k) seq[k] = k + 1;
  const auto ci = credible_interval(seq);
  CHECK(ci.lower == doctest::Approx(25.975).epsilon(1e-12));
  CHECK(ci.upper == doctest::Approx(975.025).epsilon(1e-12));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> draws(357);
  for (auto& v : draws) v = z(rng);
  for (double p : {0.0, 0.013, 0.25, 0.5, 0.9, 1.0}) {
    CHECK(quantile(draws, p) == doctest::Approx(oracle::type7_quantile(draws, p)).epsilon(1e-14));
  }
  const std::vector<double> constant(150, 2.5);
  CHECK(credible_interval(constant).lower == 2.5);
  CHECK(credible_interval(constant).upper == 2.5);
  CHECK_THROWS(credible_interval(std::vector<double>(99, 1.0)));
}

TEST_CASE("Gelman-Rubin statistic") {
  std::vector<double> a(500);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.0, 1.0);
  for (auto& v : a) v = z(rng);
  std::vector<std::span<const double>> same{a, a};
  CHECK(gelman_rubin(same) == doctest::Approx(std::sqrt(499.0 / 500.0)).epsilon(1e-12));

  std::vector<double> b(20000), c(20000);
  for (auto& v : b) v = z(rng);
  for (auto& v : c) v = z(rng);
  std::vector<std::span<const double>> iid{b, c};
  const double r = gelman_rubin(iid);
  CHECK(r >= 0.99);
  CHECK(r <= 1.05);

  for (auto& v : c) v += 10.0;
  std::vector<std::span<const double>> apart{b, c};
  CHECK(gelman_rubin(apart) > 1.5);

  std::vector<std::span<const double>> one{b};
  CHECK_THROWS(gelman_rubin(one));
}

TEST_CASE("summary invariants") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 0.3);
  const auto s = synthetic(2, 600, 100, [&](auto, auto p, auto) {
    return p == 3 ? 40.0 + 10.0 * z(rng) : (p == 1 ? -1.0 : 1.0) + z(rng);
  });
  const auto sum = summarize(s);
  CHECK(std::abs(sum.pi[0] + sum.pi[1] - 1.0) <= 1e-10);
  for (int r = 0; r < 2; ++r) CHECK(std::abs(sum.phi(0, r) + sum.phi(1, r) - 1.0) <= 1e-10);
  for (std::size_t q = 0; q < 2; ++q) {
    CHECK(sum.pi_ci[q].lower <= sum.pi_draw_mean[q]);
    CHECK(sum.pi_draw_mean[q] <= sum.pi_ci[q].upper);
  }
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(sum.phi_ci[k].lower >= 0.0);
    CHECK(sum.phi_ci[k].upper <= 1.0);
    CHECK(sum.phi_ci[k].lower <= sum.phi_draw_mean.values[k]);
    CHECK(sum.phi_draw_mean.values[k] <= sum.phi_ci[k].upper);
  }
  CHECK(sum.lambda_ci.lower <= sum.lambda_hat);
  CHECK(sum.lambda_hat <= sum.lambda_ci.upper);
  CHECK(sum.psrf.size() == 4);
  CHECK(sum.mif_curves.size() == 4);
  const auto j = summary_to_json(sum, {"off", "on"});
  CHECK(j.contains("pi"));
  CHECK(j.dump().find("off") != std::string::npos);
}
