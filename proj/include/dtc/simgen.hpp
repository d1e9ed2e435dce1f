#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dtc/tensor.hpp"

namespace dtc {

enum class CovKind { identity, ar, exchangeable };

struct CovarianceSpec {
  CovKind kind = CovKind::identity;
  double rho = 0.0;
  std::size_t dim = 1;
};

CovKind parse_cov_kind(const std::string& name);
std::string to_string(CovKind kind);

// identity, AR (rho^|i-j|) or exchangeable (1 on the diagonal, rho elsewhere).
Eigen::MatrixXd make_cov(const CovarianceSpec& spec);

// Draws X ~ TN(M; Sigma_1, ..., Sigma_m): a standard Gaussian tensor multiplied
// along mode j by the lower Cholesky factor of Sigma_j, plus M. With vec()
// taken first-index-fastest, cov(vec X) = Sigma_m (x) ... (x) Sigma_1.
DenseTensor sample_tensor_normal(const DenseTensor& mean, std::span<const CovarianceSpec> covs,
                                 std::uint64_t seed);

struct SimDesign {
  std::string name;  // "2d" or "3d"
  std::size_t n = 0;
  std::size_t d = 0;
  double mu = 0.0;
  std::size_t rank = 2;
  CovarianceSpec cov;  // per-sample covariance of the feature modes
  std::vector<double> cluster_ratios;
  std::vector<std::size_t> cluster_sizes;
  std::uint64_t seed = 0;
};

struct SimDataset {
  std::vector<DenseTensor> samples;
  DenseTensor stacked;  // samples stacked along a trailing mode
  DenseTensor noise;    // stacked minus cp_reconstruct(truth_factors)
  FactorSet truth_factors;
  std::vector<int> truth_assignment;  // labels 1..K
  SimDesign design;
};

// Cluster sizes from ratios: cumulative boundaries floor(N * cumsum / total),
// so equal ratios give floor(N/4), floor(N/2), floor(3N/4) for four clusters.
std::vector<std::size_t> cluster_sizes(std::size_t n, std::span<const double> ratios);

// Matrix samples (d1 x d1) with four clusters along the sample mode. The two
// base components put (mu, -mu, mu/2, -mu/2) on entries 1-4 and 5-8 of both
// feature modes; the sample-mode components are sign patterns over the
// clusters (+,+,-,-) and (-,+,+,-). rank > 2 appends components on entries
// 4(r-1)+1..4r with the pattern (+,-,+,-), then cycling. Noise is drawn per
// sample from TN(0; Sigma, Sigma) with Sigma from `cov` (dim is set to d1).
SimDataset gen_2d(std::size_t n, std::size_t d1, double mu, CovarianceSpec cov,
                  std::span<const double> cluster_ratios, std::uint64_t seed,
                  std::size_t rank = 2);

// Order-3 samples (d x d x d), rank 2: feature components (mu x d/4, -mu x d/4,
// 0 ...) and (0 ..., mu x d/4, -mu x d/4) on all three modes; same sample-mode
// patterns as gen_2d; standard Gaussian noise.
SimDataset gen_3d(std::size_t n, std::size_t d, double mu, std::span<const double> cluster_ratios,
                  std::uint64_t seed);

}  // namespace dtc
