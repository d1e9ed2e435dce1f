#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtc/tensor.hpp"

namespace dtc {

// Per-mode structure constraints and solver controls for stf_decompose.
//
// `sparsity[j]` is the cardinality s_j kept by truncation (d_j disables it),
// `fusion[j]` the fused-lasso weight lambda_j (0 disables it). Empty vectors
// mean "off" for every mode. Modes listed together in one `tied_modes` group
// share a single factor; the lowest index in the group is the leader and the
// others copy its update.
struct ConstraintSpec {
  std::vector<std::size_t> sparsity;
  std::vector<double> fusion;
  std::vector<std::vector<std::size_t>> tied_modes;
  int max_iters = 20;
  double conv_tol = 1e-4;
  int n_restarts = 5;
  std::uint64_t seed = 0;

  // Throws InvalidArgument when the spec cannot apply to a tensor of `dims`.
  void validate(const Dims& dims) const;

  // Copy with empty sparsity/fusion expanded to their "off" values.
  ConstraintSpec resolved(const Dims& dims) const;
};

struct StfReport {
  std::vector<int> iterations;       // per rank
  std::vector<int> chosen_restart;   // per rank; index of the winning attempt
  std::vector<int> degenerate_attempts;  // per rank
  double residual_norm = 0.0;        // ||T - reconstruction||_F
  double objective = 0.0;            // penalized objective at the returned factors
};

struct StfResult {
  FactorSet factors;
  StfReport report;
};

// One truncate-fuse-normalize power step for mode j:
//   normalize(truncatefuse(normalize(contract_except(T, current minus j, j)), s_j, lambda_j))
// `current` holds one unit vector per mode. Throws DegenerateVector if either
// normalization sees a (near-)zero vector.
Vector power_update(const DenseTensor& T, std::span<const VectorView> current, std::size_t mode,
                    const ConstraintSpec& spec);

// Rank-R structured factorization by greedy deflation: each rank is fit by
// alternating power_update over the modes until the summed squared change of
// the factors drops to conv_tol or max_iters cycles have run, then its weight
// is the full contraction and it is subtracted from T. Each rank runs
// n_restarts random initializations and keeps the one with the largest |w|.
StfResult stf_decompose(const DenseTensor& T, std::size_t rank, const ConstraintSpec& spec);

// ||T - cp_reconstruct(F)||_F^2 + sum_j lambda_j sum_r ||D beta_{j,r}||_1
double objective_value(const DenseTensor& T, const FactorSet& F, const ConstraintSpec& spec);

}  // namespace dtc
