#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtc/cluster.hpp"
#include "dtc/simgen.hpp"
#include "dtc/stf.hpp"
#include "dtc/tuning.hpp"

namespace dtc {

// One simulation setting: a generator design plus the fitting pipeline
// (BIC tuning of s and lambda at fixed rank, then K-means on the sample mode).
// The default grid is s in {0.1, ..., 1.0} shared by all modes and lambda in
// {0, 0.02, 0.05, 0.1, 0.2}.
struct ReplicationConfig {
  std::string design = "3d";  // "2d" or "3d"
  std::size_t n = 50;
  std::size_t d = 20;
  double mu = 0.8;
  CovarianceSpec cov;          // 2d feature-mode covariance
  std::vector<double> ratios;  // empty: equal clusters
  std::size_t rank = 2;
  int k = 4;
  bool tune = true;  // false: fit once with `base` as given
  TuneGrid grid = default_grid();
  ConstraintSpec base = single_start();  // single random start per rank
  KMeansOptions kmeans;

  static TuneGrid default_grid();
  static ConstraintSpec single_start();
  void validate() const;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  double recovery_error = 0.0;
  double clustering_error = 0.0;
  double seconds = 0.0;
  std::size_t sparsity = 0;  // chosen s on the first feature mode
  double lambda = 0.0;       // chosen lambda on the sample mode
  std::vector<int> assignment;
  FactorSet factors;
};

SimDataset make_dataset(const ReplicationConfig& cfg, std::uint64_t seed);

// Fits the pipeline to an already generated dataset.
ReplicationResult fit_dataset(const ReplicationConfig& cfg, const SimDataset& ds,
                              std::uint64_t seed);

ReplicationResult run_replication(const ReplicationConfig& cfg, std::uint64_t seed);

// Replication i uses seed base_seed + i; replications run concurrently.
std::vector<ReplicationResult> run_replications(const ReplicationConfig& cfg, int reps,
                                                std::uint64_t base_seed);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // sd / sqrt(n) with the n-1 sd; NaN when n < 2
};

MeanSe mean_se(std::span<const double> xs);

}  // namespace dtc
