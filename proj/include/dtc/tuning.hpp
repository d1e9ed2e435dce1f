#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "dtc/stf.hpp"
#include "dtc/tensor.hpp"

namespace dtc {

inline constexpr double kDfValueTol = 1e-8;
inline constexpr double kEpsRss = 1e-12;

// Sum over all factor columns of the number of distinct nonzero values
// (values within value_tol of each other count once).
std::size_t degrees_of_freedom(const FactorSet& F, double value_tol = kDfValueTol);

// log(max(RSS, eps_rss) / prod d_j) + (sum_j log d_j / prod d_j) * df
double bic_score(const DenseTensor& T, const FactorSet& F, double value_tol = kDfValueTol);

// Candidate values for select_model.
//
// Sparsity candidates are fractions of each mode's length (s_j = ceil(f d_j))
// when `sparsity_is_fraction`, otherwise absolute counts (clamped to d_j).
// They apply to `sparse_modes` (default: every mode); the other modes stay
// dense. Fusion weights apply to
// `fused_modes` (default: every mode). With `shared` set, one candidate value
// is used for all affected modes at once; otherwise every per-mode
// combination is tried.
struct TuneGrid {
  std::vector<std::size_t> ranks{1};
  std::vector<double> sparsity{1.0};
  std::vector<double> lambdas{0.0};
  bool sparsity_is_fraction = true;
  bool shared = true;
  std::optional<std::vector<std::size_t>> sparse_modes;
  std::optional<std::vector<std::size_t>> fused_modes;

  void validate(const Dims& dims) const;
};

struct GridPoint {
  std::size_t rank = 1;
  std::vector<double> sparsity_value;  // grid value per affected mode (one entry when shared)
  std::vector<double> lambda_value;
  std::vector<std::size_t> sparsity;   // resolved per-mode s_j
  std::vector<double> fusion;          // resolved per-mode lambda_j
};

struct GridScore {
  GridPoint point;
  double bic = std::numeric_limits<double>::infinity();
  double rss = 0.0;
  std::size_t df = 0;
  bool degenerate = false;  // the factorization collapsed; scored +inf
};

struct ModelSelection {
  std::size_t best = 0;  // index into scores
  std::vector<GridScore> scores;
  FactorSet best_factors;

  const GridScore& best_score() const { return scores.at(best); }
};

// Enumerates the grid in (rank, sparsity, lambda) ascending order.
std::vector<GridPoint> expand_grid(const TuneGrid& grid, const Dims& dims);

// Runs stf_decompose at every grid point (same seed for each) and returns the
// BIC minimizer; ties go to the earliest point in expand_grid order.
ModelSelection select_model(const DenseTensor& T, const TuneGrid& grid,
                            const ConstraintSpec& base_spec);

}  // namespace dtc
