// smoothqv: simulate Matern fields, estimate smoothness from files, run the simulation experiments.
//
// Exit codes: 0 success, 1 estimation failure, 2 input error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "smoothqv/harness.hpp"

namespace {

constexpr int kExitEstimation = 1;
constexpr int kExitInput = 2;

int simulate_command(const smoothqv::SimulationRequest& req, const std::string& sites_out,
                     const std::string& obs_out) {
  const auto out = smoothqv::simulate(req);
  smoothqv::write_text_file(sites_out, smoothqv::to_json(out.sites).dump(2) + "\n");
  smoothqv::write_text_file(obs_out, smoothqv::json(out.observations).dump() + "\n");
  std::cerr << "simulated " << out.observations.size() << " sites, jitter " << out.jitter_used << "\n";
  return 0;
}

int estimate_command(const std::string& sites, const std::string& obs, const std::string& mode,
                     const smoothqv::EstimateOptions& options) {
  const auto result = smoothqv::estimate_from_files(sites, obs, smoothqv::parse_mode(mode), options);
  std::cout << result.dump(2) << "\n";
  return 0;
}

int experiment_command(const std::string& config_path, const std::string& output_override) {
  auto config = smoothqv::experiment_config_from_json(smoothqv::read_json_file(config_path));
  if (!output_override.empty()) {
    config.output_path = output_override;
  }
  const auto report = smoothqv::run_experiment(config, smoothqv::thread_count_from_env());
  if (!config.output_path.empty()) {
    smoothqv::write_text_file(config.output_path, smoothqv::render_report(report));
  }
  std::cout << smoothqv::summary_json(report).dump(2) << "\n";
  if (report.any_nu_failed()) {
    std::cerr << "error: every replication failed for at least one nu\n";
    return kExitEstimation;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothness estimation from quadratic variations"};
  app.require_subcommand(1);

  smoothqv::SimulationRequest sim;
  std::string sim_sites_out;
  std::string sim_obs_out;
  auto* simulate = app.add_subcommand("simulate", "Simulate a Matern field on an experiment design or a sites file");
  simulate->add_option("--experiment", sim.experiment, "1, 2, 3 or custom")->capture_default_str();
  simulate->add_option("--n", sim.n, "Design size (0 = experiment default)");
  simulate->add_option("--nu", sim.nu, "Smoothness")->capture_default_str();
  simulate->add_option("--alpha", sim.alpha, "Range parameter")->capture_default_str();
  simulate->add_option("--sigma", sim.sigma, "Scale parameter")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--replication", sim.replication, "Replication index")->capture_default_str();
  simulate->add_option("--sites-in", sim.sites_path, "Sites document (custom experiment)");
  simulate->add_option("--sites-out", sim_sites_out, "Where to write the sites document")->required();
  simulate->add_option("--obs-out", sim_obs_out, "Where to write the observations")->required();

  std::string est_sites;
  std::string est_obs;
  std::string est_mode;
  std::optional<int> est_ell;
  smoothqv::EstimateOptions est_options;
  auto* estimate = app.add_subcommand("estimate", "Estimate the smoothness from a sites and an observations file");
  estimate->add_option("--sites", est_sites, "Sites document")->required();
  estimate->add_option("--obs", est_obs, "Observations (JSON array)")->required();
  estimate->add_option("--mode", est_mode, "line, curve or lattice")->required();
  estimate->add_option("--M", est_options.upper_bound, "Upper bound M (line mode)")->capture_default_str();
  estimate->add_option("--ell", est_ell, "Fixed order (line) or 1/2 (lattice)");
  estimate->add_option("--grid-step", est_options.search.grid_step)->capture_default_str();
  estimate->add_option("--tolerance", est_options.search.refine_tolerance)->capture_default_str();

  std::string exp_config;
  std::string exp_output;
  auto* experiment = app.add_subcommand("experiment", "Run a simulation experiment from a JSON config");
  experiment->add_option("config", exp_config, "Experiment config document")->required();
  experiment->add_option("--output", exp_output, "Report path (overrides outputPath)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*simulate) {
      return simulate_command(sim, sim_sites_out, sim_obs_out);
    }
    if (*estimate) {
      est_options.ell = est_ell;
      return estimate_command(est_sites, est_obs, est_mode, est_options);
    }
    return experiment_command(exp_config, exp_output);
  } catch (const smoothqv::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const smoothqv::DesignError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const smoothqv::ConfigurationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kExitEstimation;
  }
}
