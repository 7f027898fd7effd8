#include <filesystem>
#include <random>

#include "doctest.h"
#include "mim/dmh.hpp"
#include "oracles.hpp"

using namespace mim;

namespace {

struct Tiny {
  InteractionGraph graph;
  std::vector<Mark> marks;
};

Tiny tiny_instance() {
  std::mt19937_64 geo(21);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  std::vector<Point> pts(8);
  for (auto& p : pts) p = {u(geo), u(geo)};
  return {build_graph(pts, 0.2), {0, 1, 1, 0, 1, 1, 0, 1}};
}

}  // namespace

TEST_CASE("parameter layout names and indices") {
  const ParameterLayout layout(3);
  CHECK(layout.names() ==
        std::vector<std::string>{"omega_1", "omega_2", "theta_1_1", "theta_1_2", "theta_1_3",
                                 "theta_2_2", "theta_2_3", "lambda"});
  CHECK(layout.index_of("theta_2_3") == layout.theta_index(1, 2));
  CHECK(layout.theta_index(2, 1) == layout.theta_index(1, 2));
  CHECK_THROWS(layout.index_of("theta_3_3"));
  ModelParams p({0.1, 0.2, 1.0}, {1, 2, 3, 2, 4, 5, 3, 5, 1}, 7.0);
  const auto flat = layout.flatten(p);
  CHECK(flat == std::vector<double>{0.1, 0.2, 1, 2, 3, 4, 5, 7});
  const auto back = layout.unflatten(flat);
  CHECK(back.theta(2, 1) == 5.0);
  CHECK(back.omega(2) == 1.0);
  CHECK(back.theta(2, 2) == 1.0);
}

TEST_CASE("density helpers agree with closed forms") {
  CHECK(log_normal_density(1.0, 1.0, 2.0) == doctest::Approx(-std::log(2.0 * std::sqrt(2 * M_PI))));
  CHECK(log_gamma_density(2.0, 1.0, 3.0) == doctest::Approx(std::log(3.0) - 6.0));
}

TEST_CASE("a vanishing omega step is always accepted") {
  const auto t = tiny_instance();
  ProposalScales scales;
  scales.tau_omega = 1e-12;
  DmhSampler sampler(t.graph, t.marks, ModelParams(2), Priors{}, scales, 1);
  auto rng = make_rng(1);
  int accepted = 0;
  for (int k = 0; k < 2000; ++k) accepted += sampler.update_omega(0, rng) ? 1 : 0;
  CHECK(accepted == 2000);
}

TEST_CASE("updates keep the reference entries fixed") {
  const auto t = tiny_instance();
  ModelParams init(2);
  init.set_lambda(10.0);
  DmhSampler sampler(t.graph, t.marks, init, Priors{}, ProposalScales{}, 2);
  auto rng = make_rng(2);
  for (int k = 0; k < 500; ++k) {
    sampler.update_omega(0, rng);
    sampler.update_theta(0, 0, rng);
    sampler.update_theta(0, 1, rng);
    sampler.update_lambda(rng);
    REQUIRE(sampler.params().satisfies_reference_constraint());
    REQUIRE(sampler.params().lambda() > kLambdaFloor);
  }
  CHECK_THROWS(sampler.update_theta(1, 1, rng));
}

TEST_CASE("initial draws respect the lambda clamp") {
  auto rng = make_rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto p = draw_initial_params(3, Priors{}, rng);
    CHECK(p.lambda() >= kLambdaInitMin);
    CHECK(p.lambda() <= kLambdaInitMax);
    CHECK(p.satisfies_reference_constraint());
  }
}

TEST_CASE("run_chain bookkeeping is deterministic per seed") {
  const auto t = tiny_instance();
  McmcConfig config;
  config.iterations = 10;
  config.n_chains = 2;
  config.seed = 5;
  const auto a = run_chain(t.graph, t.marks, 2, Priors{}, ProposalScales{}, config);
  const auto b = run_chain(t.graph, t.marks, 2, Priors{}, ProposalScales{}, config);
  REQUIRE(a.num_chains() == 2);
  CHECK(a.burn_in == 5);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t p = 0; p < a.layout().size(); ++p) {
      CHECK(a.draws(c, p).size() == 10);
      CHECK(std::equal(a.draws(c, p).begin(), a.draws(c, p).end(), b.draws(c, p).begin()));
    }
  }
  CHECK_FALSE(std::equal(a.draws(0, 0).begin(), a.draws(0, 0).end(), a.draws(1, 0).begin()));
}

TEST_CASE("samples survive a CSV round trip") {
  const auto t = tiny_instance();
  McmcConfig config;
  config.iterations = 40;
  config.n_chains = 2;
  const auto s = run_chain(t.graph, t.marks, 2, Priors{}, ProposalScales{}, config);
  const auto path = std::filesystem::temp_directory_path() / "mim_tests_samples.csv";
  write_samples_csv(s, path);
  const auto r = read_samples_csv(path, 0.25);
  CHECK(r.num_marks == 2);
  CHECK(r.iterations == 40);
  CHECK(r.burn_in == 10);
  REQUIRE(r.num_chains() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t p = 0; p < s.layout().size(); ++p) {
      for (std::size_t k = 0; k < 40; ++k) CHECK(r.draws(c, p)[k] == s.draws(c, p)[k]);
    }
  }
}

TEST_CASE("configuration validation") {
  Priors priors;
  priors.sigma_theta = 0.0;
  CHECK_THROWS(priors.validate());
  ProposalScales scales;
  scales.tau_lambda = -1.0;
  CHECK_THROWS(scales.validate());
  McmcConfig config;
  config.burn_in_fraction = 1.0;
  CHECK_THROWS(config.validate());
  config = {};
  config.iterations = 101;
  CHECK(config.burn_in() == 50);
}

TEST_CASE("DMH omega mean tracks the exact-likelihood sampler on a tiny instance") {
  const auto t = tiny_instance();
  Priors priors;
  priors.a_lambda = 16.0;
  priors.b_lambda = 2.0;
  ProposalScales scales;
  scales.tau_omega = 0.5;
  scales.tau_theta = 0.5;
  scales.tau_lambda = 2.0;
  McmcConfig config;
  config.iterations = 60000;
  config.burn_in_fraction = 0.1;
  config.aux_sweeps = 10;
  config.seed = 31;
  const auto dmh = run_chain(t.graph, t.marks, 2, priors, scales, config);
  ModelParams start(2);
  start.set_lambda(8.0);
  const auto exact = oracle::exact_likelihood_mh(t.graph, t.marks, 2, priors, scales, start,
                                                 config.iterations, 32);
  const auto a = dmh.kept(0, 0);
  const std::span<const double> b = std::span<const double>(exact[0]).subspan(dmh.burn_in);
  const double se = std::hypot(oracle::batch_means_se(a), oracle::batch_means_se(b));
  CHECK(std::abs(oracle::mean(a) - oracle::mean(b)) < 3.0 * se);
}
