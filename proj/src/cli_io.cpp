#include "lswasp/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lswasp/errors.hpp"
#include "lswasp/metrics.hpp"
#include "lswasp/partition_runner.hpp"
#include "lswasp/version.hpp"

namespace fs = std::filesystem;

namespace lswasp {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos
                                                                ? std::string::npos
                                                                : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

// Reads a numeric CSV with a header. Row numbers in messages count data
// rows from 1.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

NumericTable read_numeric_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  NumericTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "' is empty");
  t.header = split_csv(line);
  std::set<std::string> seen;
  for (const auto& h : t.header) {
    if (h.empty()) throw ValidationError("'" + path.string() + "': empty column name in header");
    if (!seen.insert(h).second) {
      throw ValidationError("'" + path.string() + "': duplicate column '" + h + "'");
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    const std::size_t row_no = t.rows.size() + 1;
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << "'" << path.string() << "' row " << row_no << " (line " << line_no << "): expected "
         << t.header.size() << " fields, found " << cells.size();
      throw ValidationError(os.str());
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        std::ostringstream os;
        os << "'" << path.string() << "' row " << row_no << " (line " << line_no
           << "), column '" << t.header[c] << "': cannot parse '" << cells[c]
           << "' as a number";
        throw ValidationError(os.str());
      }
      vals[c] = *v;
    }
    t.rows.push_back(std::move(vals));
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return t;
}

// Write to "<path>.partial" and rename on close.
class AtomicWriter {
 public:
  explicit AtomicWriter(fs::path target)
      : target_(std::move(target)), tmp_(target_.string() + ".partial"), out_(tmp_) {
    if (!out_) throw IoError("cannot open '" + tmp_.string() + "' for writing");
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.close();
    if (!out_) throw IoError("write error on '" + tmp_.string() + "'");
    std::error_code ec;
    fs::rename(tmp_, target_, ec);
    if (ec) throw IoError("cannot rename '" + tmp_.string() + "': " + ec.message());
  }

 private:
  fs::path target_;
  fs::path tmp_;
  std::ofstream out_;
};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericalError("cannot format a double");
  return std::string(buf, ptr);
}

Dataset load_dataset_csv(const fs::path& path) {
  const NumericTable t = read_numeric_csv(path);
  const auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - t.header.begin());
  };
  const auto y_col = find("y");
  if (!y_col) throw ValidationError("'" + path.string() + "' has no response column \"y\"");
  const auto trials_col = find("trials");
  std::vector<std::size_t> x_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c != *y_col && (!trials_col || c != *trials_col)) x_cols.push_back(c);
  }
  if (x_cols.empty()) throw ValidationError("'" + path.string() + "' has no predictor columns");
  if (t.rows.empty()) throw ValidationError("'" + path.string() + "' has no data rows");

  const auto n = static_cast<Eigen::Index>(t.rows.size());
  Dataset d;
  d.y.resize(n);
  d.X.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  if (trials_col) d.trials = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    d.y(i) = row[*y_col];
    if (trials_col) (*d.trials)(i) = row[*trials_col];
    for (std::size_t c = 0; c < x_cols.size(); ++c) {
      d.X(i, static_cast<Eigen::Index>(c)) = row[x_cols[c]];
    }
  }
  return d;
}

void save_dataset_csv(const Dataset& data, const fs::path& path) {
  AtomicWriter w(path);
  auto& os = w.stream();
  os << "y";
  if (data.trials) os << ",trials";
  for (Eigen::Index j = 0; j < data.p(); ++j) os << ",x" << j + 1;
  os << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    os << format_double(data.y(i));
    if (data.trials) os << ',' << format_double((*data.trials)(i));
    for (Eigen::Index j = 0; j < data.p(); ++j) os << ',' << format_double(data.X(i, j));
    os << '\n';
  }
  w.commit();
}

void prepare_dataset(Dataset& data, Family family) {
  if (family == Family::multinomial_logistic && !data.n_categories && data.n() > 0) {
    data.n_categories = static_cast<int>(data.y.maxCoeff());
  }
  if (family == Family::logistic_binomial && !data.trials) {
    throw ValidationError("logistic regression data needs a \"trials\" column");
  }
  data.validate(family);
}

void save_draws_csv(const DrawMatrix& draws, const fs::path& path) {
  draws.validate();
  AtomicWriter w(path);
  auto& os = w.stream();
  for (std::size_t j = 0; j < draws.param_names.size(); ++j) {
    os << (j ? "," : "") << draws.param_names[j];
  }
  os << '\n';
  for (Eigen::Index t = 0; t < draws.rows(); ++t) {
    for (Eigen::Index j = 0; j < draws.dim(); ++j) {
      os << (j ? "," : "") << format_double(draws.draws(t, j));
    }
    os << '\n';
  }
  w.commit();
}

DrawMatrix load_draws_csv(const fs::path& path,
                          const std::optional<std::vector<std::string>>& expected_names) {
  const NumericTable t = read_numeric_csv(path);
  if (expected_names && *expected_names != t.header) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
      return s;
    };
    throw ValidationError("'" + path.string() + "': parameter header mismatch: expected [" +
                          join(*expected_names) + "], found [" + join(t.header) + "]");
  }
  DrawMatrix d;
  d.param_names = t.header;
  d.draws.resize(static_cast<Eigen::Index>(t.rows.size()),
                 static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      d.draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][j];
    }
  }
  try {
    d.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
  return d;
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1) throw ValidationError("n and p must be >= 1");
  if (k < 1) throw ValidationError("k must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (replications < 1) throw ValidationError("replications must be >= 1");
  if (combine_methods.empty()) throw ValidationError("combine_methods must not be empty");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (n_categories < 2) throw ValidationError("n_categories must be >= 2");
  if (!(sigma > 0.0) || !(phi > 0.0)) throw ValidationError("sigma and phi must be > 0");
  if (!(prior_variance > 0.0)) throw ValidationError("prior variance must be > 0");
  if (!(halfnormal_scale > 0.0)) throw ValidationError("half-normal scale must be > 0");
  chain.validate();
  barycenter.validate();
}

GlmSpec ExperimentConfig::glm_spec(const Dataset& data) const {
  GlmSpec spec;
  spec.family = family;
  spec.prior = PriorSpec::default_for(family, coefficient_dim(family, data), prior_variance);
  if (spec.prior.negbin_dispersion) spec.prior.negbin_dispersion->scale = halfnormal_scale;
  spec.power = 1.0;
  return spec;
}

namespace {

template <class T>
T parse_value(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValidationError("config key '" + key + "': cannot parse '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<CombineMethod> parse_methods(const std::string& raw) {
  std::vector<CombineMethod> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string m = trim(item);
    if (m.empty()) continue;
    const CombineMethod cm = parse_combine_method(m);
    if (std::find(out.begin(), out.end(), cm) == out.end()) out.push_back(cm);
  }
  return out;
}

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment.family") cfg.family = parse_family(trim(value));
  else if (key == "experiment.n") cfg.n = parse_value<Eigen::Index>(key, value);
  else if (key == "experiment.p") cfg.p = parse_value<Eigen::Index>(key, value);
  else if (key == "experiment.k") cfg.k = parse_value<int>(key, value);
  else if (key == "experiment.workers") cfg.workers = parse_value<int>(key, value);
  else if (key == "experiment.replications") cfg.replications = parse_value<int>(key, value);
  else if (key == "experiment.seed") cfg.seed = parse_value<std::uint64_t>(key, value);
  else if (key == "experiment.output_dir") cfg.output_dir = trim(value);
  else if (key == "experiment.combine_methods") cfg.combine_methods = parse_methods(value);
  else if (key == "experiment.data") {
    const std::string v = trim(value);
    if (v.empty()) cfg.data_path.reset();
    else cfg.data_path = v;
  }
  else if (key == "experiment.trials") cfg.trials = parse_value<int>(key, value);
  else if (key == "experiment.n_categories") cfg.n_categories = parse_value<int>(key, value);
  else if (key == "experiment.sigma") cfg.sigma = parse_value<double>(key, value);
  else if (key == "experiment.phi") cfg.phi = parse_value<double>(key, value);
  else if (key == "experiment.save_draws") cfg.save_draws = parse_bool(key, value);
  else if (key == "experiment.allow_partial") cfg.allow_partial = parse_bool(key, value);
  else if (key == "chain.total_iters") cfg.chain.total_iters = parse_value<int>(key, value);
  else if (key == "chain.burn_in") cfg.chain.burn_in = parse_value<int>(key, value);
  else if (key == "chain.thin") cfg.chain.thin = parse_value<int>(key, value);
  else if (key == "prior.variance") cfg.prior_variance = parse_value<double>(key, value);
  else if (key == "prior.halfnormal_scale") cfg.halfnormal_scale = parse_value<double>(key, value);
  else if (key == "barycenter.tol") cfg.barycenter.tol = parse_value<double>(key, value);
  else if (key == "barycenter.max_iter") cfg.barycenter.max_iter = parse_value<int>(key, value);
  else throw ValidationError("unknown config key '" + key + "'");
}

}  // namespace

ExperimentConfig load_experiment_config(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config file '" + path.string() + "' not found");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ValidationError("config key '" + section + "' must be inside a section");
    }
    for (const auto& [key, leaf] : body) kv[section + "." + key] = leaf.data();
  }
  apply_overrides(cfg, kv);
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) set_key(cfg, key, value);
}

void apply_environment(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv("LSWASP_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
}

// ---------------------------------------------------------------------------
// Pipeline

std::vector<std::string> report_columns() {
  return {"family", "n", "p", "k", "replication", "method", "approximation_error",
          "computational_gain_parallel", "computational_gain_sum", "barycenter_converged",
          "seed", "version", "wall_full", "wall_dnc_parallel", "wall_dnc_sum"};
}

std::string format_report_row(const ReportRow& r) {
  std::ostringstream os;
  os << r.family << ',' << r.n << ',' << r.p << ',' << r.k << ',' << r.replication << ','
     << r.method << ',' << format_double(r.approximation_error) << ','
     << format_double(r.gain_parallel) << ',' << format_double(r.gain_sum) << ','
     << (r.barycenter_converged ? "true" : "false") << ',' << r.seed << ',' << r.version
     << ',' << format_double(r.wall_full) << ',' << format_double(r.wall_dnc_parallel) << ','
     << format_double(r.wall_dnc_sum);
  return os.str();
}

std::uint64_t replication_seed(std::uint64_t base, int r) {
  return base + 100003ULL * static_cast<std::uint64_t>(r - 1);
}

Dataset experiment_data(const ExperimentConfig& cfg, std::uint64_t seed) {
  Dataset d;
  if (cfg.data_path) {
    d = load_dataset_csv(*cfg.data_path);
  } else {
    switch (cfg.family) {
      case Family::linear: d = simulate_linear(cfg.n, cfg.p, cfg.sigma, seed).data; break;
      case Family::logistic_binomial:
        d = simulate_logistic(cfg.n, cfg.p, cfg.trials, seed).data;
        break;
      case Family::negative_binomial: d = simulate_negbin(cfg.n, cfg.p, seed, cfg.phi).data; break;
      case Family::multinomial_logistic:
        d = simulate_multinomial(cfg.n, cfg.p, cfg.n_categories, seed).data;
        break;
    }
  }
  prepare_dataset(d, cfg.family);
  return d;
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + cfg.output_dir.string() +
                  "': " + ec.message());
  }

  std::vector<ReportRow> rows;
  std::ostringstream summary;
  summary << "lswasp " << kVersion << "\n"
          << "family " << to_string(cfg.family) << ", k = " << cfg.k << ", replications = "
          << cfg.replications << ", chain " << cfg.chain.total_iters << "/"
          << cfg.chain.burn_in << "/" << cfg.chain.thin << "\n\n";

  for (int r = 1; r <= cfg.replications; ++r) {
    const std::uint64_t seed = replication_seed(cfg.seed, r);
    const Dataset data = experiment_data(cfg, seed + 500000);
    const GlmSpec spec = cfg.glm_spec(data);
    const ChainConfig chain = cfg.chain.with_seed(seed);

    const FullRun full = run_full(data, spec, chain);
    const MomentSummary full_moments = moment_summary(full.draws);
    const Partition part = partition(data.n(), cfg.k, seed + 600000);
    SubsetRun subsets = run_subsets_parallel(data, part, spec, chain, cfg.workers,
                                             cfg.allow_partial);
    std::vector<DrawMatrix> usable;
    for (std::size_t j = 0; j < subsets.draws.size(); ++j) {
      if (std::find(subsets.failed.begin(), subsets.failed.end(), static_cast<int>(j + 1)) ==
          subsets.failed.end()) {
        usable.push_back(std::move(subsets.draws[j]));
      }
    }
    if (usable.empty()) throw NumericalError("every subset sampler failed");
    if (!subsets.failed.empty()) {
      summary << "replication " << r << ": combined " << usable.size() << " of " << cfg.k
              << " subsets (partial run)\n";
    }

    const std::string tag = "rep" + std::to_string(r);
    if (cfg.save_draws) save_draws_csv(full.draws, cfg.output_dir / ("full_" + tag + ".csv"));

    for (CombineMethod method : cfg.combine_methods) {
      const auto start = std::chrono::steady_clock::now();
      const CombinedPosterior combined = combine(method, usable, cfg.barycenter);
      RunTiming timing = subsets.timing;
      timing.combine_wall_clock =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      timing.full_wall_clock = full.wall_clock;

      ReportRow row;
      row.family = to_string(cfg.family);
      row.n = data.n();
      row.p = data.p();
      row.k = cfg.k;
      row.replication = r;
      row.method = to_string(method);
      row.approximation_error = approximation_error(full_moments, moment_summary(combined.draws));
      row.wall_full = full.wall_clock;
      row.wall_dnc_parallel = timing.dnc_parallel();
      row.wall_dnc_sum = timing.dnc_sum();
      row.gain_parallel = computational_gain(row.wall_full, row.wall_dnc_parallel);
      row.gain_sum = computational_gain(row.wall_full, row.wall_dnc_sum);
      row.barycenter_converged = !combined.barycenter || combined.barycenter->converged;
      row.seed = seed;
      row.version = kVersion;
      rows.push_back(row);

      if (cfg.save_draws) {
        save_draws_csv(combined.draws,
                       cfg.output_dir / (row.method + "_" + tag + ".csv"));
      }
    }
  }

  AtomicWriter report(cfg.output_dir / "report.csv");
  const auto cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) report.stream() << (i ? "," : "") << cols[i];
  report.stream() << '\n';
  for (const auto& row : rows) report.stream() << format_report_row(row) << '\n';
  report.commit();

  // Per-replication values and their mean: it is not clear whether
  // published tables average over replications, so both are given.
  for (CombineMethod method : cfg.combine_methods) {
    const std::string m = to_string(method);
    double err = 0.0, gp = 0.0, gs = 0.0;
    int count = 0;
    summary << m << "\n  replication  approximation_error  gain_parallel  gain_sum\n";
    for (const auto& row : rows) {
      if (row.method != m) continue;
      summary << "  " << row.replication << "  " << format_double(row.approximation_error)
              << "  " << format_double(row.gain_parallel) << "  "
              << format_double(row.gain_sum) << (row.barycenter_converged ? "" : "  (barycenter not converged)")
              << "\n";
      err += row.approximation_error;
      gp += row.gain_parallel;
      gs += row.gain_sum;
      ++count;
    }
    summary << "  mean  " << format_double(err / count) << "  " << format_double(gp / count)
            << "  " << format_double(gs / count) << "\n\n";
  }
  AtomicWriter sw(cfg.output_dir / "summary.txt");
  sw.stream() << summary.str();
  sw.commit();
  return rows;
}

}  // namespace lswasp
