#include "lswasp/partition_runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/random/uniform_int_distribution.hpp>

#include "lswasp/errors.hpp"
#include "lswasp/rng.hpp"

namespace lswasp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<Eigen::Index> Partition::members(int j) const {
  if (j < 1 || j > k) throw ValidationError("subset index out of range");
  std::vector<Eigen::Index> rows;
  rows.reserve(static_cast<std::size_t>(sizes[static_cast<std::size_t>(j - 1)]));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == j) rows.push_back(static_cast<Eigen::Index>(i));
  }
  return rows;
}

Partition partition(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 1) throw ValidationError("number of subsets k must be >= 1");
  if (n < 1) throw ValidationError("cannot partition an empty dataset");
  if (k > n) {
    std::ostringstream os;
    os << "k = " << k << " exceeds the number of rows n = " << n;
    throw ValidationError(os.str());
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng = make_rng(seed);
  // Fisher-Yates with Boost's portable integer distribution
  for (Eigen::Index i = n - 1; i > 0; --i) {
    boost::random::uniform_int_distribution<Eigen::Index> pick(0, i);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
  }

  Partition part;
  part.k = k;
  part.assignments.assign(static_cast<std::size_t>(n), 0);
  part.sizes.assign(static_cast<std::size_t>(k), n / k);
  for (Eigen::Index j = 0; j < n % k; ++j) ++part.sizes[static_cast<std::size_t>(j)];
  std::size_t pos = 0;
  for (int j = 1; j <= k; ++j) {
    for (Eigen::Index r = 0; r < part.sizes[static_cast<std::size_t>(j - 1)]; ++r) {
      part.assignments[static_cast<std::size_t>(perm[pos++])] = j;
    }
  }
  return part;
}

double RunTiming::dnc_parallel() const {
  const double worst = subset_wall_clocks.empty()
                           ? 0.0
                           : *std::max_element(subset_wall_clocks.begin(),
                                               subset_wall_clocks.end());
  return worst + combine_wall_clock;
}

double RunTiming::dnc_sum() const {
  return std::accumulate(subset_wall_clocks.begin(), subset_wall_clocks.end(), 0.0) +
         combine_wall_clock;
}

double subset_power(Eigen::Index n, Eigen::Index m) {
  if (m < 1 || m > n) throw ValidationError("subset size must lie in 1..n");
  return static_cast<double>(n) / static_cast<double>(m);
}

SubsetRun run_subsets_parallel(const Dataset& data, const Partition& part,
                               const GlmSpec& spec, const ChainConfig& cfg, int workers,
                               bool allow_partial) {
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (part.n() != data.n()) {
    throw ValidationError("partition does not match the dataset row count");
  }
  cfg.validate();
  spec.validate();

  const int k = part.k;
  SubsetRun out;
  out.draws.resize(static_cast<std::size_t>(k));
  out.timing.subset_wall_clocks.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<std::string> errors(static_cast<std::size_t>(k));
  std::vector<char> ok(static_cast<std::size_t>(k), 0);
  std::vector<ErrorKind> kinds(static_cast<std::size_t>(k), ErrorKind::validation);

  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      const int idx = next.fetch_add(1);
      if (idx >= k) return;
      const int j = idx + 1;
      const auto start = std::chrono::steady_clock::now();
      try {
        const std::vector<Eigen::Index> rows = part.members(j);
        const Dataset sub = data.subset(rows);
        GlmSpec sub_spec = spec;
        sub_spec.power = subset_power(data.n(), sub.n());
        out.draws[static_cast<std::size_t>(idx)] =
            sample_posterior(sub, sub_spec, cfg.with_seed(cfg.seed + static_cast<std::uint64_t>(j)));
        ok[static_cast<std::size_t>(idx)] = 1;
      } catch (const Error& e) {
        errors[static_cast<std::size_t>(idx)] = e.what();
        kinds[static_cast<std::size_t>(idx)] = e.kind();
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(idx)] = e.what();
        kinds[static_cast<std::size_t>(idx)] = ErrorKind::numerical;
      }
      out.timing.subset_wall_clocks[static_cast<std::size_t>(idx)] = seconds_since(start);
    }
  };

  const int n_threads = std::min(workers, k);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }

  std::ostringstream msg;
  bool numerical = false;
  for (int j = 1; j <= k; ++j) {
    if (ok[static_cast<std::size_t>(j - 1)]) continue;
    out.failed.push_back(j);
    msg << "\n  subset " << j << ": " << errors[static_cast<std::size_t>(j - 1)];
    if (kinds[static_cast<std::size_t>(j - 1)] == ErrorKind::numerical) numerical = true;
  }
  if (!out.failed.empty() && !allow_partial) {
    std::ostringstream os;
    os << out.failed.size() << " of " << k << " subset samplers failed:" << msg.str();
    if (numerical) throw NumericalError(os.str());
    throw ValidationError(os.str());
  }
  return out;
}

FullRun run_full(const Dataset& data, const GlmSpec& spec, const ChainConfig& cfg) {
  GlmSpec full = spec;
  full.power = 1.0;
  const auto start = std::chrono::steady_clock::now();
  FullRun out;
  out.draws = sample_posterior(data, full, cfg);
  out.wall_clock = seconds_since(start);
  return out;
}

}  // namespace lswasp
