#pragma once

// CSV formats, experiment configuration and the end-to-end pipeline.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lswasp/barycenter.hpp"
#include "lswasp/draw_matrix.hpp"
#include "lswasp/glm_models.hpp"
#include "lswasp/samplers.hpp"

namespace lswasp {

/// Header row required. Column "y" is the response, optional "trials"
/// holds binomial trial counts, every other column is a predictor in file
/// order. Family checks happen at fit time.
Dataset load_dataset_csv(const std::filesystem::path& path);
void save_dataset_csv(const Dataset& data, const std::filesystem::path& path);

/// Fills in what a family needs from a loaded file (category count for
/// multinomial data) and validates.
void prepare_dataset(Dataset& data, Family family);

/// Values are written in shortest round-trip form, so load(save(x)) == x.
void save_draws_csv(const DrawMatrix& draws, const std::filesystem::path& path);
/// With `expected_names`, a header that differs raises a ValidationError
/// listing both.
DrawMatrix load_draws_csv(const std::filesystem::path& path,
                          const std::optional<std::vector<std::string>>& expected_names =
                              std::nullopt);

struct ExperimentConfig {
  Family family = Family::logistic_binomial;
  Eigen::Index n = 10000;
  Eigen::Index p = 10;
  int k = 20;
  int workers = 1;
  ChainConfig chain;
  int replications = 10;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "lswasp_out";
  std::vector<CombineMethod> combine_methods{CombineMethod::wasp, CombineMethod::dpmc};
  std::optional<std::filesystem::path> data_path;  // use a file instead of simulating

  // simulation and prior settings
  int trials = 15;
  int n_categories = 3;
  double sigma = 1.0;
  double phi = 2.0;
  double prior_variance = 100.0;
  double halfnormal_scale = 5.0;
  FixedPointConfig barycenter;
  bool save_draws = true;
  bool allow_partial = false;

  void validate() const;
  GlmSpec glm_spec(const Dataset& data) const;
};

/// INI file with [experiment], [chain], [prior] and [barycenter] sections.
/// Unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Applies "section.key" -> value overrides on top of `cfg`.
void apply_overrides(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv);

/// LSWASP_OUTPUT_DIR, when set, replaces output_dir.
void apply_environment(ExperimentConfig& cfg);

struct ReportRow {
  std::string family;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  int k = 0;
  int replication = 0;
  std::string method;
  double approximation_error = 0.0;
  double gain_parallel = 0.0;
  double gain_sum = 0.0;
  bool barycenter_converged = true;
  std::uint64_t seed = 0;
  std::string version;
  double wall_full = 0.0;
  double wall_dnc_parallel = 0.0;
  double wall_dnc_sum = 0.0;
};

/// Column order of report.csv.
std::vector<std::string> report_columns();
std::string format_report_row(const ReportRow& row);

/// Simulated (or loaded) data, full fit, partition, subset fits and every
/// requested combination, for each replication. Writes report.csv,
/// summary.txt and draw files under output_dir. Files are written under a
/// ".partial" name and renamed once complete.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

/// Seed for replication r (1-based).
std::uint64_t replication_seed(std::uint64_t base, int r);

/// Data for one replication from the config.
Dataset experiment_data(const ExperimentConfig& cfg, std::uint64_t seed);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace lswasp
