#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dtc/stf.hpp"
#include "dtc/tensor.hpp"

namespace dtc {

struct KMeansOptions {
  int n_init = 10;
  int max_iter = 100;
  std::uint64_t seed = 0;
};

struct ClusteringResult {
  std::vector<int> assignment;  // labels 1..k
  Eigen::MatrixXd centers;      // k x R
  int k = 0;
  double within_dispersion = 0.0;  // sum of squared distances to assigned centers
};

// A single Lloyd run from k-means++ seeding. `objective_trace` holds the
// objective after every assignment/update step.
struct KMeansRun {
  ClusteringResult result;
  std::vector<double> objective_trace;
};

KMeansRun kmeans_single(const Eigen::MatrixXd& X, int K, int max_iter, std::uint64_t seed);

// Best of opts.n_init runs (run i seeded with opts.seed + i); rows of X are
// the points.
ClusteringResult kmeans(const Eigen::MatrixXd& X, int K, const KMeansOptions& opts = {});

struct DtcResult {
  ClusteringResult clustering;
  FactorSet factors;
  StfReport report;
};

// Clusters the samples stacked along the last mode of T using the rows of
// the factor matrix of `cluster_mode` (default: last mode).
DtcResult dtc_stacked(const DenseTensor& T, int K, std::size_t rank, const ConstraintSpec& spec,
                      const KMeansOptions& kopts = {},
                      std::optional<std::size_t> cluster_mode = std::nullopt);

// Stack, factorize, cluster.
DtcResult dtc(std::span<const DenseTensor> samples, int K, std::size_t rank,
              const ConstraintSpec& spec, const KMeansOptions& kopts = {});

// Fraction of unordered pairs whose co-membership differs between the two
// labelings. Invariant to relabeling either argument.
double clustering_error(std::span<const int> est, std::span<const int> truth);

struct GapResult {
  int chosen_k = 1;
  std::vector<double> gap;    // index k-1
  std::vector<double> se;
  std::vector<double> log_w;  // log W_k on the data
};

// Gap statistic with B reference sets drawn uniformly over the per-column
// bounding box of X. Picks the smallest k with gap(k) >= gap(k+1) - se(k+1),
// else k_max.
GapResult gap_statistic(const Eigen::MatrixXd& X, int k_max, int B, std::uint64_t seed,
                        const KMeansOptions& kopts = {});

// ||reconstruct(est) - reconstruct(truth)||_F / ||reconstruct(truth)||_F
double recovery_error(const FactorSet& est, const FactorSet& truth, const Dims& dims);

}  // namespace dtc
