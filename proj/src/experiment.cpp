#include "dtc/experiment.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>

#include "dtc/errors.hpp"
#include "dtc/kernels.hpp"

namespace dtc {

ConstraintSpec ReplicationConfig::single_start() {
  ConstraintSpec s;
  s.n_restarts = 1;
  return s;
}

TuneGrid ReplicationConfig::default_grid() {
  TuneGrid g;
  g.sparsity = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  g.lambdas = {0.0, 0.02, 0.05, 0.1, 0.2};
  return g;
}

void ReplicationConfig::validate() const {
  if (design != "2d" && design != "3d")
    throw InvalidArgument("design must be '2d' or '3d', got '" + design + "'");
  if (rank < 1) throw InvalidArgument("rank must be at least 1");
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InvalidArgument("K must lie in [1, N]");
  if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
}

SimDataset make_dataset(const ReplicationConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (cfg.design == "2d") return gen_2d(cfg.n, cfg.d, cfg.mu, cfg.cov, cfg.ratios, seed, cfg.rank);
  if (cfg.rank != 2) throw InvalidArgument("the 3d design has rank 2");
  return gen_3d(cfg.n, cfg.d, cfg.mu, cfg.ratios, seed);
}

ReplicationResult fit_dataset(const ReplicationConfig& cfg, const SimDataset& ds,
                              std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ReplicationResult res;
  res.seed = seed;
  ConstraintSpec spec = cfg.base;
  spec.seed = seed;
  const DenseTensor& T = ds.stacked;
  if (cfg.tune) {
    TuneGrid grid = cfg.grid;
    grid.ranks = {cfg.rank};
    auto sel = select_model(T, grid, spec);
    res.sparsity = sel.best_score().point.sparsity.front();
    res.lambda = sel.best_score().point.fusion.back();
    res.factors = std::move(sel.best_factors);
  } else {
    auto fit = stf_decompose(T, cfg.rank, spec);
    const auto rs = spec.resolved(T.dims());
    res.sparsity = rs.sparsity.front();
    res.lambda = rs.fusion.back();
    res.factors = std::move(fit.factors);
  }
  KMeansOptions ko = cfg.kmeans;
  ko.seed = seed;
  auto clustering = kmeans(res.factors.factors.back(), cfg.k, ko);
  res.assignment = std::move(clustering.assignment);
  res.recovery_error = recovery_error(res.factors, ds.truth_factors, T.dims());
  res.clustering_error = clustering_error(res.assignment, ds.truth_assignment);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

ReplicationResult run_replication(const ReplicationConfig& cfg, std::uint64_t seed) {
  const SimDataset ds = make_dataset(cfg, seed);
  return fit_dataset(cfg, ds, seed);
}

std::vector<ReplicationResult> run_replications(const ReplicationConfig& cfg, int reps,
                                                std::uint64_t base_seed) {
  if (reps < 1) throw InvalidArgument("replication count must be at least 1");
  cfg.validate();
  std::vector<ReplicationResult> out(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> failures(out.size());
#pragma omp parallel for schedule(dynamic) if (kernels::thread_count() > 1)
  for (int i = 0; i < reps; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_replication(cfg, base_seed + static_cast<std::uint64_t>(i));
    } catch (...) {
      failures[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

MeanSe mean_se(std::span<const double> xs) {
  MeanSe m;
  if (xs.empty()) {
    m.mean = m.se = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) {
    m.se = std::numeric_limits<double>::quiet_NaN();
    return m;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  const double n = static_cast<double>(xs.size());
  m.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return m;
}

}  // namespace dtc
