// lswasp: simulate -> fit-full / fit-dnc -> combine -> evaluate, or `run`
// for the whole pipeline from a config file.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lswasp/barycenter.hpp"
#include "lswasp/cli_io.hpp"
#include "lswasp/errors.hpp"
#include "lswasp/metrics.hpp"
#include "lswasp/partition_runner.hpp"
#include "lswasp/version.hpp"

namespace fs = std::filesystem;
using namespace lswasp;

namespace {

struct ChainOpts {
  int iters = 10000;
  int burn_in = 5000;
  int thin = 5;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--iters", iters, "Total iterations per chain")->capture_default_str();
    app->add_option("--burn-in", burn_in, "Burn-in iterations")->capture_default_str();
    app->add_option("--thin", thin, "Keep every thin-th draw")->capture_default_str();
    app->add_option("--seed", seed, "Base seed")->capture_default_str();
  }
  ChainConfig config() const { return {iters, burn_in, thin, seed}; }
};

struct ModelOpts {
  std::string family = "logistic";
  double prior_variance = 100.0;
  double halfnormal_scale = 5.0;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "linear, logistic, negbin or multinomial")
        ->capture_default_str();
    app->add_option("--prior-variance", prior_variance, "Gaussian prior variance")
        ->capture_default_str();
    app->add_option("--halfnormal-scale", halfnormal_scale, "Half-normal scale on phi")
        ->capture_default_str();
  }
  GlmSpec spec(const Dataset& data) const {
    GlmSpec s;
    s.family = parse_family(family);
    s.prior = PriorSpec::default_for(s.family, coefficient_dim(s.family, data), prior_variance);
    if (s.prior.negbin_dispersion) s.prior.negbin_dispersion->scale = halfnormal_scale;
    return s;
  }
};

Dataset load_for(const fs::path& path, const std::string& family) {
  Dataset d = load_dataset_csv(path);
  prepare_dataset(d, parse_family(family));
  return d;
}

std::string subset_file(int j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "subset_%03d.csv", j);
  return buf;
}

int exit_code(ErrorKind k) { return static_cast<int>(k); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divide-and-conquer posterior sampling for GLMs (version " +
               std::string(kVersion) + ")"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // simulate
  auto* sim = app.add_subcommand("simulate", "Write a simulated dataset as CSV");
  std::string sim_family = "logistic", sim_out;
  Eigen::Index sim_n = 10000, sim_p = 10;
  std::uint64_t sim_seed = 1;
  int sim_trials = 15, sim_categories = 3;
  double sim_sigma = 1.0, sim_phi = 2.0;
  sim->add_option("--family", sim_family, "linear, logistic, negbin or multinomial")
      ->capture_default_str();
  sim->add_option("--n", sim_n, "Rows")->capture_default_str();
  sim->add_option("--p", sim_p, "Predictors")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Seed")->capture_default_str();
  sim->add_option("--trials", sim_trials, "Binomial trials per row")->capture_default_str();
  sim->add_option("--categories", sim_categories, "Multinomial categories")->capture_default_str();
  sim->add_option("--sigma", sim_sigma, "Linear noise sd")->capture_default_str();
  sim->add_option("--phi", sim_phi, "Negative-binomial dispersion")->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV")->required();

  // fit-full
  auto* full = app.add_subcommand("fit-full", "Sample the full-data posterior");
  std::string full_data, full_out;
  ChainOpts full_chain;
  ModelOpts full_model;
  full->add_option("--data", full_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  full->add_option("--out", full_out, "Draws CSV")->required();
  full_chain.attach(full);
  full_model.attach(full);

  // fit-dnc
  auto* dnc = app.add_subcommand("fit-dnc", "Partition the data and sample every subset");
  std::string dnc_data, dnc_out;
  ChainOpts dnc_chain;
  ModelOpts dnc_model;
  int dnc_k = 10, dnc_workers = 1;
  std::uint64_t dnc_partition_seed = 1;
  bool dnc_partial = false;
  dnc->add_option("--data", dnc_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  dnc->add_option("--out-dir", dnc_out, "Directory for subset draws")->required();
  dnc->add_option("--k", dnc_k, "Number of subsets")->capture_default_str();
  dnc->add_option("--workers", dnc_workers, "Worker threads")->capture_default_str();
  dnc->add_option("--partition-seed", dnc_partition_seed, "Partition seed")->capture_default_str();
  dnc->add_flag("--allow-partial", dnc_partial, "Keep going when some subsets fail");
  dnc_chain.attach(dnc);
  dnc_model.attach(dnc);

  // combine
  auto* comb = app.add_subcommand("combine", "Combine subset draws");
  std::string comb_method = "wasp", comb_out;
  std::vector<std::string> comb_inputs;
  FixedPointConfig comb_fp;
  comb->add_option("--method", comb_method, "wasp or dpmc")->capture_default_str();
  comb->add_option("--out", comb_out, "Combined draws CSV")->required();
  comb->add_option("--tol", comb_fp.tol, "Fixed-point tolerance")->capture_default_str();
  comb->add_option("--max-iter", comb_fp.max_iter, "Fixed-point iteration cap")
      ->capture_default_str();
  comb->add_option("inputs", comb_inputs, "Subset draw CSVs")
      ->required()
      ->check(CLI::ExistingFile);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Approximation error and computational gain");
  std::string eval_full, eval_approx;
  double t_full = 0.0, t_dnc = 0.0;
  eval->add_option("--full", eval_full, "Full-data draws CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--approx", eval_approx, "Combined draws CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--t-full", t_full, "Full-data wall clock (s)");
  eval->add_option("--t-dnc", t_dnc, "Divide-and-conquer wall clock (s)");

  // run
  auto* run = app.add_subcommand("run", "Full experiment from a config file");
  std::string run_config, run_output;
  std::vector<std::string> run_sets;
  bool run_partial = false;
  run->add_option("--config", run_config, "INI config")->required()->check(CLI::ExistingFile);
  run->add_option("--set", run_sets, "Override, e.g. --set chain.thin=2");
  run->add_option("--output-dir", run_output, "Output directory");
  run->add_flag("--allow-partial", run_partial, "Combine whatever subsets succeed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::validation);
  }

  try {
    if (*sim) {
      const Family f = parse_family(sim_family);
      SimulatedData s;
      switch (f) {
        case Family::linear: s = simulate_linear(sim_n, sim_p, sim_sigma, sim_seed); break;
        case Family::logistic_binomial:
          s = simulate_logistic(sim_n, sim_p, sim_trials, sim_seed);
          break;
        case Family::negative_binomial: s = simulate_negbin(sim_n, sim_p, sim_seed, sim_phi); break;
        case Family::multinomial_logistic:
          s = simulate_multinomial(sim_n, sim_p, sim_categories, sim_seed);
          break;
      }
      save_dataset_csv(s.data, sim_out);
      std::cout << "wrote " << s.data.n() << " rows to " << sim_out << "\n";
    } else if (*full) {
      const Dataset d = load_for(full_data, full_model.family);
      const FullRun r = run_full(d, full_model.spec(d), full_chain.config());
      save_draws_csv(r.draws, full_out);
      std::cout << "wall_clock " << format_double(r.wall_clock) << "\n";
      if (r.draws.diagnostics.acceptance_rate) {
        std::cout << "acceptance_rate " << format_double(*r.draws.diagnostics.acceptance_rate)
                  << "\n";
      }
    } else if (*dnc) {
      const Dataset d = load_for(dnc_data, dnc_model.family);
      const Partition part = partition(d.n(), dnc_k, dnc_partition_seed);
      const SubsetRun r = run_subsets_parallel(d, part, dnc_model.spec(d), dnc_chain.config(),
                                               dnc_workers, dnc_partial);
      fs::create_directories(dnc_out);
      std::ofstream timing(fs::path(dnc_out) / "timing.csv");
      timing << "subset,size,wall_clock,status\n";
      for (int j = 1; j <= dnc_k; ++j) {
        const bool failed =
            std::find(r.failed.begin(), r.failed.end(), j) != r.failed.end();
        if (!failed) save_draws_csv(r.draws[static_cast<std::size_t>(j - 1)], fs::path(dnc_out) / subset_file(j));
        timing << j << ',' << part.sizes[static_cast<std::size_t>(j - 1)] << ','
               << format_double(r.timing.subset_wall_clocks[static_cast<std::size_t>(j - 1)]) << ','
               << (failed ? "failed" : "ok") << '\n';
      }
      std::cout << "max_subset_wall_clock " << format_double(r.timing.dnc_parallel()) << "\n"
                << "sum_subset_wall_clock " << format_double(r.timing.dnc_sum()) << "\n";
      if (!r.failed.empty()) {
        std::cerr << "warning: " << r.failed.size() << " subset(s) failed; see timing.csv\n";
      }
    } else if (*comb) {
      std::vector<DrawMatrix> draws;
      for (const auto& path : comb_inputs) {
        draws.push_back(draws.empty() ? load_draws_csv(path)
                                      : load_draws_csv(path, draws.front().param_names));
      }
      const auto start = std::chrono::steady_clock::now();
      const CombinedPosterior c = combine(parse_combine_method(comb_method), draws, comb_fp);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      save_draws_csv(c.draws, comb_out);
      std::cout << "combine_wall_clock " << format_double(secs) << "\n";
      if (c.barycenter) {
        std::cout << "barycenter_converged " << (c.barycenter->converged ? "true" : "false")
                  << "\nbarycenter_iterations " << c.barycenter->iterations_used << "\n";
        if (!c.barycenter->converged) {
          std::cerr << "warning: barycenter fixed point did not converge (last step "
                    << c.barycenter->final_step_norm << ")\n";
        }
      }
    } else if (*eval) {
      const DrawMatrix f = load_draws_csv(eval_full);
      const DrawMatrix a = load_draws_csv(eval_approx, f.param_names);
      std::cout << "approximation_error "
                << format_double(approximation_error(moment_summary(f), moment_summary(a))) << "\n";
      if (t_full > 0.0 || t_dnc > 0.0) {
        std::cout << "computational_gain " << format_double(computational_gain(t_full, t_dnc))
                  << "\n";
      }
    } else if (*run) {
      ExperimentConfig cfg = load_experiment_config(run_config);
      apply_environment(cfg);
      std::map<std::string, std::string> kv;
      for (const auto& s : run_sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
      }
      apply_overrides(cfg, kv);
      if (!run_output.empty()) cfg.output_dir = run_output;
      if (run_partial) cfg.allow_partial = true;
      const auto rows = run_experiment(cfg);
      std::cout << "wrote " << rows.size() << " report rows to "
                << (cfg.output_dir / "report.csv").string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(ErrorKind::numerical);
  }
  return 0;
}
