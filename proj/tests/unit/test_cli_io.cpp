#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lswasp/cli_io.hpp"
#include "lswasp/errors.hpp"
#include "test_helpers.hpp"

using namespace lswasp;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lswasp_unit";
  fs::create_directories(dir);
  return dir / name;
}
void write_file(const fs::path& p, const std::string& body) {
  std::ofstream(p) << body;
}
}  // namespace

TEST_CASE("dataset CSV") {
  const fs::path p = scratch("three.csv");
  write_file(p, "y,x1,x2\n1,0.5,2\n0,-1,3\n2,1e-3,4\n");
  const Dataset d = load_dataset_csv(p);
  CHECK(d.n() == 3);
  CHECK(d.p() == 2);
  CHECK_FALSE(d.trials.has_value());
  CHECK(d.X(2, 0) == 1e-3);

  write_file(p, "x1,trials,y\n0.5,15,3\n-1,15,7\n");
  Dataset b = load_dataset_csv(p);
  REQUIRE(b.trials.has_value());
  CHECK((*b.trials)(1) == 15.0);
  CHECK(b.y(1) == 7.0);
  CHECK(b.p() == 1);
  CHECK_NOTHROW(prepare_dataset(b, Family::logistic_binomial));

  std::string body = "y,x1\n";
  for (int r = 1; r <= 6; ++r) body += "1," + std::to_string(r) + "\n";
  body += "1,abc\n";
  write_file(p, body);
  try {
    load_dataset_csv(p);
    FAIL("expected a parse error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 7") != std::string::npos);
    CHECK(msg.find("x1") != std::string::npos);
  }

  write_file(p, "x1,x2\n1,2\n");
  CHECK_THROWS_AS(load_dataset_csv(p), ValidationError);
  CHECK_THROWS_AS(load_dataset_csv(scratch("missing.csv")), IoError);

  const SimulatedData sim = simulate_logistic(30, 3, 15, 1);
  save_dataset_csv(sim.data, p);
  const Dataset back = load_dataset_csv(p);
  CHECK(back.X == sim.data.X);
  CHECK(back.y == sim.data.y);
  CHECK(*back.trials == *sim.data.trials);
}

TEST_CASE("draws CSV round trip") {
  Rng rng = make_rng(4);
  DrawMatrix d;
  d.draws = lswasp::testing::gaussian_matrix(50, 3, rng) * 1e-7;
  d.draws(0, 0) = 1.0 / 3.0;
  d.draws(1, 1) = -0.0;
  d.param_names = {"beta_1", "beta_2", "log_phi"};
  const fs::path p = scratch("draws.csv");
  save_draws_csv(d, p);
  const DrawMatrix back = load_draws_csv(p);
  CHECK(back.draws == d.draws);
  CHECK(back.param_names == d.param_names);

  CHECK_NOTHROW(load_draws_csv(p, d.param_names));
  try {
    load_draws_csv(p, std::vector<std::string>{"beta_1", "beta_2"});
    FAIL("expected a header mismatch");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("header mismatch") != std::string::npos);
  }

  DrawMatrix empty;
  empty.draws.resize(0, 2);
  empty.param_names = {"a", "b"};
  CHECK_THROWS_AS(save_draws_csv(empty, p), ValidationError);
  write_file(p, "a,b\n");
  CHECK_THROWS_AS(load_draws_csv(p), ValidationError);
}

TEST_CASE("experiment config") {
  const fs::path p = scratch("exp.ini");
  write_file(p,
             "[experiment]\nfamily = linear\nn = 1000\np = 3\nk = 4\nreplications = 2\n"
             "combine_methods = wasp\n\n[chain]\ntotal_iters = 2000\nburn_in = 1000\nthin = 1\n"
             "\n[prior]\nvariance = 25\n");
  ExperimentConfig cfg = load_experiment_config(p);
  CHECK(cfg.family == Family::linear);
  CHECK(cfg.n == 1000);
  CHECK(cfg.k == 4);
  CHECK(cfg.chain.retained() == 1000);
  CHECK(cfg.combine_methods == std::vector<CombineMethod>{CombineMethod::wasp});
  CHECK(cfg.prior_variance == 25.0);
  CHECK(cfg.replications == 2);

  apply_overrides(cfg, {{"experiment.k", "8"}, {"chain.thin", "2"}});
  CHECK(cfg.k == 8);
  CHECK(cfg.chain.thin == 2);
  CHECK_THROWS_AS(apply_overrides(cfg, {{"experiment.bogus", "1"}}), ValidationError);
  CHECK_THROWS_AS(apply_overrides(cfg, {{"experiment.n", "ten"}}), ValidationError);

  write_file(p, "[experiment]\nreplications = 0\n");
  CHECK_THROWS_AS(load_experiment_config(p).validate(), ValidationError);
}

TEST_CASE("run_experiment on a tiny linear problem") {
  ExperimentConfig cfg;
  cfg.family = Family::linear;
  cfg.n = 1000;
  cfg.p = 3;
  cfg.k = 1;
  cfg.replications = 1;
  cfg.chain = {1000, 0, 1, 77};
  cfg.output_dir = scratch("exp_out");
  fs::remove_all(cfg.output_dir);
  const auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.approximation_error < 0.05);
    CHECK(r.barycenter_converged);
    CHECK(r.gain_parallel > 0.0);
  }
  CHECK(fs::exists(cfg.output_dir / "report.csv"));
  CHECK(fs::exists(cfg.output_dir / "summary.txt"));
  CHECK(fs::exists(cfg.output_dir / "wasp_rep1.csv"));
  CHECK_FALSE(fs::exists(cfg.output_dir / "report.csv.partial"));
  std::ifstream in(cfg.output_dir / "report.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind(
            "family,n,p,k,replication,method,approximation_error,computational_gain_parallel,"
            "computational_gain_sum,barycenter_converged,seed",
            0) == 0);
}
