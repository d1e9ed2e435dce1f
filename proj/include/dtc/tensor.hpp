#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace dtc {

using Vector = std::vector<double>;
using Dims = std::vector<std::size_t>;
using VectorView = std::span<const double>;

std::size_t num_elements(const Dims& dims);

// Dense m-way array. Storage is one flat buffer with the LAST index varying
// fastest, so fibres along the last mode are contiguous.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(Dims dims);  // zero-filled
  DenseTensor(Dims dims, Vector data);

  const Dims& dims() const noexcept { return dims_; }
  std::size_t order() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t mode) const { return dims_.at(mode); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> mutable_data() noexcept { return data_; }

  double operator[](std::size_t flat) const { return data_[flat]; }
  double at(std::span<const std::size_t> index) const;
  double& at(std::span<const std::size_t> index);
  std::size_t flat_index(std::span<const std::size_t> index) const;

  bool operator==(const DenseTensor&) const = default;

 private:
  Dims dims_;
  Vector data_;
};

// Rank-R CP model: sum_r weights[r] * factors[0].col(r) o ... o factors[m-1].col(r).
// Columns are unit norm; weights may be negative.
struct FactorSet {
  Vector weights;
  std::vector<Eigen::MatrixXd> factors;

  std::size_t rank() const noexcept { return weights.size(); }
  std::size_t order() const noexcept { return factors.size(); }
  Dims dims() const;
  VectorView column(std::size_t mode, std::size_t r) const;
};

// Throws if any column's norm is more than tol away from 1, or shapes disagree.
void validate_factor_set(const FactorSet& F, double tol = 1e-8);

DenseTensor stack_samples(std::span<const DenseTensor> samples);

// Slice i along the last mode, as a tensor of the remaining dims. Inverse of
// stack_samples. Requires order >= 2.
DenseTensor last_mode_slice(const DenseTensor& T, std::size_t i);

// Contracts every mode except `mode` against `others` (given in mode order,
// skipping `mode`). Result has length dims[mode].
Vector contract_except(const DenseTensor& T, std::span<const VectorView> others,
                       std::size_t mode);

double full_contract(const DenseTensor& T, std::span<const VectorView> vectors);

DenseTensor cp_reconstruct(const FactorSet& F, const Dims& dims);

// T - w * (v_1 o ... o v_m). Vectors must be unit norm within 1e-8.
DenseTensor subtract_rank_one(const DenseTensor& T, double w,
                              std::span<const VectorView> vectors);

double frobenius_norm(const DenseTensor& T);

}  // namespace dtc
