// Command line front end: simulate, fit, transform, mif, mcf.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mim/descriptive.hpp"
#include "mim/dmh.hpp"
#include "mim/graph.hpp"
#include "mim/pattern.hpp"
#include "mim/posterior.hpp"
#include "mim/simulate.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> labels_from_manifest(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  return json::parse(in).at("labels").get<std::vector<std::string>>();
}

std::string mark_name(const std::vector<std::string>& labels, int q) {
  return labels.empty() ? std::to_string(q + 1) : labels.at(static_cast<std::size_t>(q));
}

struct SimulateArgs {
  std::string process = "poisson";
  std::string scenario = "high-attraction";
  std::string kernel = "exponential";
  mim::SimulationConfig config;
  std::string out;
};

int run_simulate(SimulateArgs& a) {
  if (a.process == "poisson") {
    a.config.process = mim::PointProcess::poisson;
  } else if (a.process == "lgcp") {
    a.config.process = mim::PointProcess::lgcp;
  } else {
    throw std::invalid_argument("--process must be poisson or lgcp");
  }
  a.config.lgcp.kernel = a.kernel == "squared-exponential"
                             ? mim::CovarianceKernel::squared_exponential
                             : mim::CovarianceKernel::exponential;
  a.config.scenario = mim::parse_scenario(a.scenario);
  const auto pattern = mim::simulate_pattern(a.config);
  mim::save_pattern(pattern, a.out);
  const auto counts = pattern.mark_counts();
  std::cout << "wrote " << pattern.size() << " points to " << a.out << " (";
  for (int q = 0; q < pattern.num_marks(); ++q) {
    std::cout << (q ? ", " : "") << "mark " << pattern.labels()[static_cast<std::size_t>(q)]
              << ": " << counts[static_cast<std::size_t>(q)];
  }
  std::cout << ")\n";
  return 0;
}

struct FitArgs {
  std::string data;
  std::optional<double> length;
  double c = 0.1;
  mim::McmcConfig config{};
  mim::Priors priors{};
  mim::ProposalScales scales{};
  std::string out;
  std::string manifest;
};

int run_fit(FitArgs& a) {
  const auto pattern = mim::load_pattern(a.data, a.length);
  const auto graph = mim::build_graph(pattern, a.c);
  std::cerr << "fitting " << pattern.size() << " points, Q=" << pattern.num_marks() << ", "
            << graph.edges().size() << " edges within c=" << a.c << '\n';

  const auto start = std::chrono::steady_clock::now();
  const auto samples = mim::run_chain(pattern, graph, a.priors, a.scales, a.config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  mim::write_samples_csv(samples, a.out);

  const auto layout = samples.layout();
  json manifest;
  manifest["data"] = a.data;
  manifest["num_points"] = pattern.size();
  manifest["num_marks"] = pattern.num_marks();
  manifest["labels"] = pattern.labels();
  manifest["rescale_length"] = pattern.length();
  manifest["c"] = a.c;
  manifest["num_edges"] = graph.edges().size();
  manifest["config"] = {{"iterations", a.config.iterations},
                        {"iteration_meaning", "one update of every free parameter"},
                        {"burn_in_fraction", a.config.burn_in_fraction},
                        {"burn_in", samples.burn_in},
                        {"aux_sweeps", a.config.aux_sweeps},
                        {"chains", a.config.n_chains},
                        {"seed", a.config.seed}};
  manifest["priors"] = {{"mu_omega", a.priors.mu_omega},   {"sigma_omega", a.priors.sigma_omega},
                        {"mu_theta", a.priors.mu_theta},   {"sigma_theta", a.priors.sigma_theta},
                        {"a_lambda", a.priors.a_lambda},   {"b_lambda", a.priors.b_lambda}};
  manifest["proposal_scales"] = {{"tau_omega", a.scales.tau_omega},
                                 {"tau_theta", a.scales.tau_theta},
                                 {"tau_lambda", a.scales.tau_lambda}};
  json rates = json::array();
  for (std::size_t k = 0; k < samples.num_chains(); ++k) {
    json chain;
    for (std::size_t p = 0; p < layout.size(); ++p) {
      chain[layout.names()[p]] = samples.acceptance_rate(k, p);
    }
    rates.push_back(chain);
  }
  manifest["acceptance_rates"] = rates;
  manifest["wall_time_seconds"] = seconds;
  const std::string manifest_path = a.manifest.empty() ? a.out + ".manifest.json" : a.manifest;
  std::ofstream(manifest_path) << manifest.dump(2) << '\n';

  const auto estimate = mim::posterior_mean(samples);
  std::cout << "posterior means:";
  const auto flat = layout.flatten(estimate);
  for (std::size_t p = 0; p < layout.size(); ++p) {
    std::cout << ' ' << layout.names()[p] << '=' << flat[p];
  }
  std::cout << "\nwrote " << a.out << " and " << manifest_path << " (" << seconds << " s)\n";
  return 0;
}

struct TransformArgs {
  std::string samples;
  double burn_in = 0.5;
  double level = 0.95;
  std::string manifest;
  std::string out;
};

int run_transform(const TransformArgs& a) {
  const auto samples = mim::read_samples_csv(a.samples, a.burn_in);
  const auto summary = mim::summarize(samples, a.level);
  const auto doc = mim::summary_to_json(summary, labels_from_manifest(a.manifest));
  if (a.out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream(a.out) << doc.dump(2) << '\n';
    std::cout << "wrote " << a.out << '\n';
  }
  return 0;
}

struct MifArgs {
  std::string samples;
  double burn_in = 0.5;
  double d_max = 0.3;
  int points = 200;
  std::string manifest;
  std::string out;
};

int run_mif(const MifArgs& a) {
  if (a.points < 2) throw std::invalid_argument("--points must be >= 2");
  const auto samples = mim::read_samples_csv(a.samples, a.burn_in);
  const auto estimate = mim::posterior_mean(samples);
  const auto labels = labels_from_manifest(a.manifest);
  std::vector<double> grid(static_cast<std::size_t>(a.points));
  for (int k = 0; k < a.points; ++k) {
    grid[static_cast<std::size_t>(k)] = a.d_max * k / (a.points - 1);
  }
  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  out.precision(17);
  out << "d,q,q_prime,value\n";
  for (int q = 0; q < estimate.num_marks(); ++q) {
    for (int r = 0; r < estimate.num_marks(); ++r) {
      const auto curve = mim::mif_curve(estimate, q, r, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        out << grid[k] << ',' << mark_name(labels, q) << ',' << mark_name(labels, r) << ','
            << curve[k] << '\n';
      }
    }
  }
  std::cout << "wrote " << a.out << '\n';
  return 0;
}

struct McfArgs {
  std::string data;
  std::optional<double> length;
  double d_max = 0.3;
  int bins = 60;
  bool suggest = false;
  double tolerance = 0.02;
  std::string out;
};

int run_mcf(const McfArgs& a) {
  const auto pattern = mim::load_pattern(a.data, a.length);
  const auto est = mim::mcf(pattern, a.d_max, a.bins);
  const auto& labels = pattern.labels();
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    out.precision(17);
    out << "bin_mid,q,q_prime,value,pair_count\n";
    for (std::size_t b = 0; b < est.num_bins(); ++b) {
      for (std::size_t p = 0; p < est.mark_pairs.size(); ++p) {
        const auto [q, r] = est.mark_pairs[p];
        out << est.bin_mid(b) << ',' << mark_name(labels, q) << ',' << mark_name(labels, r)
            << ',';
        if (est.defined(b)) {
          out << est.values[b][p];
        } else {
          out << "NA";
        }
        out << ',' << est.counts[b][p] << '\n';
      }
    }
    std::cout << "wrote " << a.out << '\n';
  }
  if (a.suggest) {
    const auto s = mim::suggest_c(est, a.tolerance);
    if (!s.converged) {
      std::cerr << "warning: MCF curves did not settle before d = " << 0.5 * a.d_max
                << "; falling back to c = " << s.c << '\n';
    }
    std::cout << "suggested c = " << s.c << (s.capped ? " (capped)" : "") << '\n';
    std::cout << "tail means:";
    for (std::size_t p = 0; p < est.mark_pairs.size() && p < s.tail_means.size(); ++p) {
      const auto [q, r] = est.mark_pairs[p];
      std::cout << " MCF_" << mark_name(labels, q) << ',' << mark_name(labels, r) << '='
                << s.tail_means[p];
    }
    std::cout << "\nbin_mid excess_over_band\n";
    for (std::size_t b = 0; b < est.num_bins(); ++b) {
      std::cout << est.bin_mid(b) << ' ' << s.excess[b] << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian mark interaction model for multi-type point patterns"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a two-type marked point pattern");
  simulate->add_option("--process", sim.process, "poisson or lgcp")
      ->check(CLI::IsMember({"poisson", "lgcp"}));
  simulate->add_option("--eta", sim.config.eta, "Poisson intensity")->capture_default_str();
  simulate->add_option("--scenario", sim.scenario, "interaction scenario")
      ->check(CLI::IsMember({"high-attraction", "low-attraction", "random", "low-repulsion",
                             "high-repulsion"}))
      ->capture_default_str();
  simulate->add_option("--lambda", sim.config.lambda, "decay rate")->capture_default_str();
  simulate->add_option("--c", sim.config.threshold, "interaction threshold")
      ->capture_default_str();
  simulate->add_option("--sweeps", sim.config.sweeps,
                       "Gibbs sweeps over all points (single-site updates / n)")
      ->capture_default_str();
  simulate->add_option("--seed", sim.config.seed)->capture_default_str();
  simulate->add_option("--grid", sim.config.lgcp.grid_resolution, "LGCP cells per axis")
      ->capture_default_str();
  simulate->add_option("--gp-variance", sim.config.lgcp.gp_variance)->capture_default_str();
  simulate->add_option("--gp-scale", sim.config.lgcp.gp_scale)->capture_default_str();
  simulate->add_option("--kernel", sim.kernel, "LGCP covariance kernel")
      ->check(CLI::IsMember({"exponential", "squared-exponential"}))
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "output CSV")->required();

  FitArgs fit;
  fit.config.n_chains = 4;
  auto* fit_cmd = app.add_subcommand("fit", "fit the model by double Metropolis-Hastings");
  fit_cmd->add_option("--data", fit.data, "pattern CSV (x,y,mark)")->required();
  fit_cmd->add_option("--length", fit.length,
                      "rescaling length for raw data (default: bounding-box side)");
  fit_cmd->add_option("--c", fit.c, "interaction threshold")->capture_default_str();
  fit_cmd->add_option("--iterations", fit.config.iterations)->capture_default_str();
  fit_cmd->add_option("--burn-in", fit.config.burn_in_fraction, "burn-in fraction")
      ->capture_default_str();
  fit_cmd->add_option("--chains", fit.config.n_chains)->capture_default_str();
  fit_cmd->add_option("--aux-sweeps", fit.config.aux_sweeps)->capture_default_str();
  fit_cmd->add_option("--seed", fit.config.seed)->capture_default_str();
  fit_cmd->add_option("--mu-omega", fit.priors.mu_omega)->capture_default_str();
  fit_cmd->add_option("--sigma-omega", fit.priors.sigma_omega)->capture_default_str();
  fit_cmd->add_option("--mu-theta", fit.priors.mu_theta)->capture_default_str();
  fit_cmd->add_option("--sigma-theta", fit.priors.sigma_theta)->capture_default_str();
  fit_cmd->add_option("--a-lambda", fit.priors.a_lambda)->capture_default_str();
  fit_cmd->add_option("--b-lambda", fit.priors.b_lambda)->capture_default_str();
  fit_cmd->add_option("--tau-omega", fit.scales.tau_omega)->capture_default_str();
  fit_cmd->add_option("--tau-theta", fit.scales.tau_theta)->capture_default_str();
  fit_cmd->add_option("--tau-lambda", fit.scales.tau_lambda)->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "samples CSV")->required();
  fit_cmd->add_option("--manifest", fit.manifest, "run manifest (default <out>.manifest.json)");

  TransformArgs tr;
  auto* transform = app.add_subcommand("transform", "summarize samples as pi, Phi and lambda");
  transform->add_option("--samples", tr.samples)->required();
  transform->add_option("--burn-in", tr.burn_in)->capture_default_str();
  transform->add_option("--level", tr.level, "credible level")->capture_default_str();
  transform->add_option("--manifest", tr.manifest, "fit manifest, for mark labels");
  transform->add_option("--out", tr.out, "summary JSON (default: stdout)");

  MifArgs mif;
  auto* mif_cmd = app.add_subcommand("mif", "mark interaction function curves");
  mif_cmd->add_option("--samples", mif.samples)->required();
  mif_cmd->add_option("--burn-in", mif.burn_in)->capture_default_str();
  mif_cmd->add_option("--dmax", mif.d_max)->capture_default_str();
  mif_cmd->add_option("--points", mif.points)->capture_default_str();
  mif_cmd->add_option("--manifest", mif.manifest, "fit manifest, for mark labels");
  mif_cmd->add_option("--out", mif.out, "curve CSV")->required();

  McfArgs mcf;
  auto* mcf_cmd = app.add_subcommand("mcf", "empirical mark connection functions");
  mcf_cmd->add_option("--data", mcf.data)->required();
  mcf_cmd->add_option("--length", mcf.length, "rescaling length for raw data");
  mcf_cmd->add_option("--dmax", mcf.d_max)->capture_default_str();
  mcf_cmd->add_option("--bins", mcf.bins)->capture_default_str();
  mcf_cmd->add_option("--tol", mcf.tolerance, "flatness band for --suggest-c")
      ->capture_default_str();
  mcf_cmd->add_flag("--suggest-c", mcf.suggest, "print a suggested threshold c");
  mcf_cmd->add_option("--out", mcf.out, "MCF CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (transform->parsed()) return run_transform(tr);
    if (mif_cmd->parsed()) return run_mif(mif);
    if (mcf_cmd->parsed()) return run_mcf(mcf);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
