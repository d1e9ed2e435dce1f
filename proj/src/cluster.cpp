#include "dtc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dtc/errors.hpp"
#include "dtc/kernels.hpp"

namespace dtc {

namespace {

using Eigen::Index;

double sq_dist(const Eigen::MatrixXd& X, Index i, const Eigen::MatrixXd& C, Index k) {
  return (X.row(i) - C.row(k)).squaredNorm();
}

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& X, int K, std::mt19937_64& rng) {
  const Index n = X.rows();
  Eigen::MatrixXd C(K, X.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  C.row(0) = X.row(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = sq_dist(X, i, C, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 1; k < K; ++k) {
    double total = 0.0;
    for (double v : d2) total += v;
    Index chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double cum = 0.0;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        cum += d2[static_cast<std::size_t>(i)];
        if (cum > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    C.row(k) = X.row(chosen);
    for (Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], sq_dist(X, i, C, k));
  }
  return C;
}

void check_k(const Eigen::MatrixXd& X, int K) {
  if (K < 1) throw InvalidArgument("K must be at least 1");
  if (K > X.rows())
    throw InvalidArgument("K = " + std::to_string(K) + " exceeds the number of points (" +
                          std::to_string(X.rows()) + ")");
}

}  // namespace

KMeansRun kmeans_single(const Eigen::MatrixXd& X, int K, int max_iter, std::uint64_t seed) {
  check_k(X, K);
  if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
  const Index n = X.rows();
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd C = plus_plus_seeds(X, K, rng);

  KMeansRun run;
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> next(static_cast<std::size_t>(n));
  std::vector<double> dist(static_cast<std::size_t>(n));
  double objective = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(X, i, C, 0);
      for (int k = 1; k < K; ++k) {
        const double d = sq_dist(X, i, C, k);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      next[static_cast<std::size_t>(i)] = best;
      dist[static_cast<std::size_t>(i)] = bd;
    }

    // Empty clusters take the point farthest from its center among clusters
    // that can spare one.
    std::vector<int> counts(static_cast<std::size_t>(K), 0);
    for (int a : next) ++counts[static_cast<std::size_t>(a)];
    for (int k = 0; k < K; ++k) {
      if (counts[static_cast<std::size_t>(k)] > 0) continue;
      Index far = -1;
      double fd = -1.0;
      for (Index i = 0; i < n; ++i) {
        const int a = next[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(a)] < 2) continue;
        if (dist[static_cast<std::size_t>(i)] > fd) {
          fd = dist[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])];
      next[static_cast<std::size_t>(far)] = k;
      counts[static_cast<std::size_t>(k)] = 1;
      dist[static_cast<std::size_t>(far)] = 0.0;
      C.row(k) = X.row(far);
    }

    C.setZero();
    for (Index i = 0; i < n; ++i) C.row(next[static_cast<std::size_t>(i)]) += X.row(i);
    for (int k = 0; k < K; ++k) C.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);

    objective = 0.0;
    for (Index i = 0; i < n; ++i) objective += sq_dist(X, i, C, next[static_cast<std::size_t>(i)]);
    run.objective_trace.push_back(objective);

    const bool converged = next == assign;
    assign = next;
    if (converged) break;
  }

  run.result.k = K;
  run.result.centers = std::move(C);
  run.result.within_dispersion = objective;
  run.result.assignment.resize(assign.size());
  for (std::size_t i = 0; i < assign.size(); ++i) run.result.assignment[i] = assign[i] + 1;
  return run;
}

ClusteringResult kmeans(const Eigen::MatrixXd& X, int K, const KMeansOptions& opts) {
  check_k(X, K);
  if (opts.n_init < 1) throw InvalidArgument("n_init must be at least 1");
  std::vector<KMeansRun> runs(static_cast<std::size_t>(opts.n_init));
#pragma omp parallel for schedule(dynamic) if (kernels::thread_count() > 1 && X.rows() > 256)
  for (int i = 0; i < opts.n_init; ++i)
    runs[static_cast<std::size_t>(i)] =
        kmeans_single(X, K, opts.max_iter, opts.seed + static_cast<std::uint64_t>(i));
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].result.within_dispersion < runs[best].result.within_dispersion) best = i;
  return std::move(runs[best].result);
}

DtcResult dtc_stacked(const DenseTensor& T, int K, std::size_t rank, const ConstraintSpec& spec,
                      const KMeansOptions& kopts, std::optional<std::size_t> cluster_mode) {
  const std::size_t mode = cluster_mode.value_or(T.order() - 1);
  if (mode >= T.order()) throw InvalidArgument("cluster mode out of range");
  if (K < 1 || static_cast<std::size_t>(K) > T.dim(mode))
    throw InvalidArgument("K must lie in [1, " + std::to_string(T.dim(mode)) + "]");
  DtcResult out;
  auto stf = stf_decompose(T, rank, spec);
  out.factors = std::move(stf.factors);
  out.report = std::move(stf.report);
  out.clustering = kmeans(out.factors.factors[mode], K, kopts);
  return out;
}

DtcResult dtc(std::span<const DenseTensor> samples, int K, std::size_t rank,
              const ConstraintSpec& spec, const KMeansOptions& kopts) {
  return dtc_stacked(stack_samples(samples), K, rank, spec, kopts);
}

double clustering_error(std::span<const int> est, std::span<const int> truth) {
  if (est.size() != truth.size())
    throw DimensionMismatch("assignment lengths differ (" + std::to_string(est.size()) + " vs " +
                            std::to_string(truth.size()) + ")");
  const std::size_t n = est.size();
  if (n < 2) throw InvalidArgument("clustering_error needs at least two samples");
  std::size_t disagree = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      disagree += static_cast<std::size_t>((est[i] == est[j]) != (truth[i] == truth[j]));
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(disagree) / pairs;
}

GapResult gap_statistic(const Eigen::MatrixXd& X, int k_max, int B, std::uint64_t seed,
                        const KMeansOptions& kopts) {
  if (k_max < 1 || k_max > X.rows())
    throw InvalidArgument("k_max must lie in [1, number of points]");
  if (B < 1) throw InvalidArgument("B must be at least 1");
  const auto safe_log = [](double w) { return std::log(std::max(w, std::numeric_limits<double>::min())); };

  GapResult g;
  g.log_w.resize(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    KMeansOptions o = kopts;
    o.seed = seed;
    g.log_w[static_cast<std::size_t>(k - 1)] = safe_log(kmeans(X, k, o).within_dispersion);
  }

  const Eigen::RowVectorXd lo = X.colwise().minCoeff();
  const Eigen::RowVectorXd hi = X.colwise().maxCoeff();
  std::vector<std::vector<double>> ref(static_cast<std::size_t>(B),
                                       std::vector<double>(static_cast<std::size_t>(k_max)));
#pragma omp parallel for schedule(dynamic) if (kernels::thread_count() > 1)
  for (int b = 0; b < B; ++b) {
    const std::uint64_t stream = seed + 1 + static_cast<std::uint64_t>(b);
    std::mt19937_64 rng(stream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd Z(X.rows(), X.cols());
    for (Index i = 0; i < Z.rows(); ++i)
      for (Index c = 0; c < Z.cols(); ++c) Z(i, c) = lo(c) + (hi(c) - lo(c)) * unit(rng);
    for (int k = 1; k <= k_max; ++k) {
      KMeansOptions o = kopts;
      o.seed = stream;
      ref[static_cast<std::size_t>(b)][static_cast<std::size_t>(k - 1)] =
          safe_log(kmeans(Z, k, o).within_dispersion);
    }
  }

  g.gap.resize(static_cast<std::size_t>(k_max));
  g.se.resize(static_cast<std::size_t>(k_max));
  for (std::size_t k = 0; k < static_cast<std::size_t>(k_max); ++k) {
    double mean = 0.0;
    for (int b = 0; b < B; ++b) mean += ref[static_cast<std::size_t>(b)][k];
    mean /= B;
    double var = 0.0;
    for (int b = 0; b < B; ++b) {
      const double dv = ref[static_cast<std::size_t>(b)][k] - mean;
      var += dv * dv;
    }
    var /= B;
    g.gap[k] = mean - g.log_w[k];
    g.se[k] = std::sqrt(var) * std::sqrt(1.0 + 1.0 / B);
  }
  g.chosen_k = k_max;
  for (int k = 1; k < k_max; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    if (g.gap[i] >= g.gap[i + 1] - g.se[i + 1]) {
      g.chosen_k = k;
      break;
    }
  }
  return g;
}

double recovery_error(const FactorSet& est, const FactorSet& truth, const Dims& dims) {
  const DenseTensor a = cp_reconstruct(est, dims);
  const DenseTensor b = cp_reconstruct(truth, dims);
  const double denom = frobenius_norm(b);
  if (!(denom > 0.0)) throw InvalidArgument("true factor set reconstructs to the zero tensor");
  Vector diff(a.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[i] - b[i];
  return std::sqrt(kernels::omp::sum_squares(diff)) / denom;
}

}  // namespace dtc
