#include <map>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lswasp/barycenter.hpp"
#include "lswasp/cli_io.hpp"
#include "lswasp/errors.hpp"
#include "lswasp/glm_models.hpp"
#include "lswasp/metrics.hpp"
#include "lswasp/partition_runner.hpp"
#include "lswasp/psd_linalg.hpp"
#include "lswasp/samplers.hpp"
#include "lswasp/version.hpp"

namespace py = pybind11;
using namespace lswasp;

namespace {

Dataset make_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     std::optional<Eigen::VectorXd> trials, const std::string& family) {
  Dataset d;
  d.X = X;
  d.y = y;
  d.trials = std::move(trials);
  prepare_dataset(d, parse_family(family));
  return d;
}

GlmSpec make_spec(const Dataset& d, const std::string& family, double prior_variance) {
  GlmSpec s;
  s.family = parse_family(family);
  s.prior = PriorSpec::default_for(s.family, coefficient_dim(s.family, d), prior_variance);
  return s;
}

DrawMatrix wrap_draws(const Eigen::MatrixXd& m) {
  DrawMatrix dm;
  dm.draws = m;
  dm.param_names = indexed_names("theta_", m.cols());
  return dm;
}

py::dict dataset_dict(const SimulatedData& s) {
  py::dict out;
  out["X"] = s.data.X;
  out["y"] = s.data.y;
  if (s.data.trials) out["trials"] = *s.data.trials;
  out["truth"] = s.truth.flatten();
  return out;
}

}  // namespace

PYBIND11_MODULE(_lswasp, m) {
  m.doc() = "Wasserstein posterior combination for divide-and-conquer MCMC";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("psd_sqrt",
        [](const Eigen::MatrixXd& a) { return psd_sqrt(SymMatrix(a)).matrix(); }, py::arg("a"));
  m.def("bures_distance",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
          return bures_dist(SymMatrix(a), SymMatrix(b));
        },
        py::arg("a"), py::arg("b"));
  m.def("gaussian_w2",
        [](const Eigen::VectorXd& m1, const Eigen::MatrixXd& s1, const Eigen::VectorXd& m2,
           const Eigen::MatrixXd& s2) {
          return std::sqrt(gaussian_w2_sq(m1, SymMatrix(s1), m2, SymMatrix(s2)));
        },
        py::arg("mean1"), py::arg("cov1"), py::arg("mean2"), py::arg("cov2"));

  m.def("barycenter_cov",
        [](const std::vector<Eigen::MatrixXd>& covs, double tol, int max_iter) {
          std::vector<SymMatrix> s;
          for (const auto& c : covs) s.emplace_back(c);
          FixedPointConfig cfg;
          cfg.tol = tol;
          cfg.max_iter = max_iter;
          const BarycenterResult r = barycenter_cov_fixed_point(s, cfg);
          return py::make_tuple(r.cov.matrix(), r.converged, r.iterations_used);
        },
        py::arg("covs"), py::arg("tol") = 1e-10, py::arg("max_iter") = 500,
        "Returns (cov, converged, iterations).");

  m.def("simulate",
        [](const std::string& family, Eigen::Index n, Eigen::Index p, std::uint64_t seed,
           int trials, int n_categories, double sigma, double phi) {
          switch (parse_family(family)) {
            case Family::linear: return dataset_dict(simulate_linear(n, p, sigma, seed));
            case Family::logistic_binomial:
              return dataset_dict(simulate_logistic(n, p, trials, seed));
            case Family::negative_binomial:
              return dataset_dict(simulate_negbin(n, p, seed, phi));
            case Family::multinomial_logistic:
              return dataset_dict(simulate_multinomial(n, p, n_categories, seed));
          }
          throw ValidationError("unknown family");
        },
        py::arg("family"), py::arg("n"), py::arg("p"), py::arg("seed") = 1,
        py::arg("trials") = 15, py::arg("n_categories") = 3, py::arg("sigma") = 1.0,
        py::arg("phi") = 2.0);

  m.def("partition",
        [](Eigen::Index n, int k, std::uint64_t seed) {
          const Partition part = partition(n, k, seed);
          std::vector<std::vector<Eigen::Index>> out;
          for (int j = 1; j <= k; ++j) out.push_back(part.members(j));
          return out;
        },
        py::arg("n"), py::arg("k"), py::arg("seed") = 1,
        "Row indices (0-based, ascending) of each of the k subsets.");

  m.def("sample_posterior",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::string& family,
           std::optional<Eigen::VectorXd> trials, double power, int total_iters, int burn_in,
           int thin, std::uint64_t seed, double prior_variance) {
          const Dataset d = make_dataset(X, y, std::move(trials), family);
          GlmSpec spec = make_spec(d, family, prior_variance);
          spec.power = power;
          DrawMatrix dm;
          {
            py::gil_scoped_release release;
            dm = sample_posterior(d, spec, ChainConfig{total_iters, burn_in, thin, seed});
          }
          return py::make_tuple(dm.draws, dm.param_names, dm.diagnostics.acceptance_rate);
        },
        py::arg("X"), py::arg("y"), py::arg("family"), py::arg("trials") = py::none(),
        py::arg("power") = 1.0, py::arg("total_iters") = 10000, py::arg("burn_in") = 5000,
        py::arg("thin") = 5, py::arg("seed") = 1, py::arg("prior_variance") = 100.0,
        "Returns (draws, parameter names, acceptance rate or None).");

  m.def("fit_subsets",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::string& family, int k,
           std::optional<Eigen::VectorXd> trials, int workers, int total_iters, int burn_in,
           int thin, std::uint64_t seed, std::uint64_t partition_seed, double prior_variance) {
          const Dataset d = make_dataset(X, y, std::move(trials), family);
          const GlmSpec spec = make_spec(d, family, prior_variance);
          SubsetRun r;
          {
            py::gil_scoped_release release;
            r = run_subsets_parallel(d, partition(d.n(), k, partition_seed), spec,
                                     ChainConfig{total_iters, burn_in, thin, seed}, workers);
          }
          std::vector<Eigen::MatrixXd> out;
          for (const auto& dm : r.draws) out.push_back(dm.draws);
          return py::make_tuple(out, r.timing.subset_wall_clocks);
        },
        py::arg("X"), py::arg("y"), py::arg("family"), py::arg("k"),
        py::arg("trials") = py::none(), py::arg("workers") = 1, py::arg("total_iters") = 10000,
        py::arg("burn_in") = 5000, py::arg("thin") = 5, py::arg("seed") = 1,
        py::arg("partition_seed") = 1, py::arg("prior_variance") = 100.0,
        "Subset posteriors with the n/m likelihood power. Returns (draws list, wall clocks).");

  m.def("combine",
        [](const std::vector<Eigen::MatrixXd>& subsets, const std::string& method, double tol,
           int max_iter) {
          std::vector<DrawMatrix> draws;
          for (const auto& s : subsets) draws.push_back(wrap_draws(s));
          FixedPointConfig cfg;
          cfg.tol = tol;
          cfg.max_iter = max_iter;
          const CombinedPosterior c = combine(parse_combine_method(method), draws, cfg);
          py::dict out;
          out["draws"] = c.draws.draws;
          out["mean"] = c.mean;
          out["cov"] = c.cov.matrix();
          if (c.barycenter) {
            out["converged"] = c.barycenter->converged;
            out["iterations"] = c.barycenter->iterations_used;
          }
          return out;
        },
        py::arg("subsets"), py::arg("method") = "wasp", py::arg("tol") = 1e-10,
        py::arg("max_iter") = 500);

  m.def("approximation_error",
        [](const Eigen::MatrixXd& full, const Eigen::MatrixXd& approx) {
          return approximation_error(moment_summary(full), moment_summary(approx));
        },
        py::arg("full"), py::arg("approx"));
  m.def("computational_gain", &computational_gain, py::arg("t_full"), py::arg("t_dnc"));
  m.def("effective_sample_size",
        [](const Eigen::MatrixXd& draws) { return effective_sample_size(draws); },
        py::arg("draws"), "Per-column effective sample size.");

  m.def("run_experiment",
        [](const std::filesystem::path& config, const std::map<std::string, std::string>& overrides) {
          ExperimentConfig cfg = load_experiment_config(config);
          apply_environment(cfg);
          apply_overrides(cfg, overrides);
          std::vector<ReportRow> rows;
          {
            py::gil_scoped_release release;
            rows = run_experiment(cfg);
          }
          py::list out;
          for (const auto& r : rows) {
            py::dict d;
            d["family"] = r.family;
            d["n"] = r.n;
            d["p"] = r.p;
            d["k"] = r.k;
            d["replication"] = r.replication;
            d["method"] = r.method;
            d["approximation_error"] = r.approximation_error;
            d["gain_parallel"] = r.gain_parallel;
            d["gain_sum"] = r.gain_sum;
            d["barycenter_converged"] = r.barycenter_converged;
            d["seed"] = r.seed;
            out.append(d);
          }
          return out;
        },
        py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{},
        "Run a config file; overrides use section.key names.");
}
