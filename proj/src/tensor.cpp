#include "dtc/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dtc/errors.hpp"
#include "dtc/kernels.hpp"

namespace dtc {

namespace {

void check_dims(const Dims& dims) {
  if (dims.empty()) throw InvalidArgument("tensor order must be at least 1");
  for (auto d : dims)
    if (d == 0) throw InvalidArgument("tensor dimensions must be positive");
}

std::string dims_str(const Dims& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

// Outer product of the given vectors, last one varying fastest.
Vector outer(std::span<const VectorView> vectors) {
  Vector out{1.0};
  for (const auto& v : vectors) {
    Vector next(out.size() * v.size());
    for (std::size_t p = 0; p < out.size(); ++p)
      for (std::size_t k = 0; k < v.size(); ++k) next[p * v.size() + k] = out[p] * v[k];
    out = std::move(next);
  }
  return out;
}

void check_vectors(const DenseTensor& T, std::span<const VectorView> vectors) {
  if (vectors.size() != T.order())
    throw DimensionMismatch("expected one vector per mode");
  for (std::size_t k = 0; k < vectors.size(); ++k)
    if (vectors[k].size() != T.dim(k))
      throw DimensionMismatch("vector for mode " + std::to_string(k) + " has length " +
                              std::to_string(vectors[k].size()) + ", expected " +
                              std::to_string(T.dim(k)));
}

}  // namespace

std::size_t num_elements(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(num_elements(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, Vector data) : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != num_elements(dims_))
    throw DimensionMismatch("data length " + std::to_string(data_.size()) +
                            " does not match dims " + dims_str(dims_));
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw DimensionMismatch("index order mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (index[k] >= dims_[k]) throw InvalidArgument("index out of range");
    flat = flat * dims_[k] + index[k];
  }
  return flat;
}

double DenseTensor::at(std::span<const std::size_t> index) const {
  return data_[flat_index(index)];
}

double& DenseTensor::at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }

Dims FactorSet::dims() const {
  Dims d;
  for (const auto& f : factors) d.push_back(static_cast<std::size_t>(f.rows()));
  return d;
}

VectorView FactorSet::column(std::size_t mode, std::size_t r) const {
  const auto& f = factors.at(mode);
  return VectorView(f.col(static_cast<Eigen::Index>(r)).data(), static_cast<std::size_t>(f.rows()));
}

void validate_factor_set(const FactorSet& F, double tol) {
  if (F.rank() == 0) throw InvalidArgument("factor set has rank 0");
  if (F.factors.empty()) throw InvalidArgument("factor set has no modes");
  for (std::size_t j = 0; j < F.order(); ++j) {
    if (static_cast<std::size_t>(F.factors[j].cols()) != F.rank())
      throw DimensionMismatch("factor matrix column count does not match rank");
    for (std::size_t r = 0; r < F.rank(); ++r) {
      const double n = F.factors[j].col(static_cast<Eigen::Index>(r)).norm();
      if (std::abs(n - 1.0) > tol)
        throw InvalidArgument("factor column (mode " + std::to_string(j) + ", rank " +
                              std::to_string(r) + ") is not unit norm");
    }
  }
}

DenseTensor stack_samples(std::span<const DenseTensor> samples) {
  if (samples.empty()) throw InvalidArgument("cannot stack an empty sample list");
  const Dims& base = samples.front().dims();
  for (const auto& s : samples)
    if (s.dims() != base)
      throw DimensionMismatch("sample dims " + dims_str(s.dims()) + " differ from " +
                              dims_str(base));
  Dims dims = base;
  const std::size_t n = samples.size();
  dims.push_back(n);
  const std::size_t per = num_elements(base);
  Vector data(per * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = samples[i].data();
    for (std::size_t p = 0; p < per; ++p) data[p * n + i] = src[p];
  }
  return DenseTensor(std::move(dims), std::move(data));
}

DenseTensor last_mode_slice(const DenseTensor& T, std::size_t i) {
  if (T.order() < 2) throw InvalidArgument("last_mode_slice requires order >= 2");
  const std::size_t n = T.dims().back();
  if (i >= n) throw InvalidArgument("slice index out of range");
  Dims dims(T.dims().begin(), T.dims().end() - 1);
  const std::size_t per = num_elements(dims);
  Vector data(per);
  const auto src = T.data();
  for (std::size_t p = 0; p < per; ++p) data[p] = src[p * n + i];
  return DenseTensor(std::move(dims), std::move(data));
}

Vector contract_except(const DenseTensor& T, std::span<const VectorView> others,
                       std::size_t mode) {
  const std::size_t m = T.order();
  if (mode >= m) throw InvalidArgument("mode index out of range");
  if (others.size() + 1 != m) throw DimensionMismatch("expected one vector per other mode");

  // Contract from the last mode down; the modes below the current one are
  // all still present, so mode k always sits at position k.
  Dims cur = T.dims();
  Vector buffer;
  std::span<const double> src = T.data();
  for (std::size_t kk = m; kk-- > 0;) {
    if (kk == mode) continue;
    const VectorView v = others[kk < mode ? kk : kk - 1];
    if (v.size() != T.dim(kk))
      throw DimensionMismatch("vector for mode " + std::to_string(kk) + " has length " +
                              std::to_string(v.size()) + ", expected " +
                              std::to_string(T.dim(kk)));
    kernels::ModeView shape;
    shape.left = std::accumulate(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(kk),
                                 std::size_t{1}, std::multiplies<>());
    shape.mid = cur[kk];
    shape.right = std::accumulate(cur.begin() + static_cast<std::ptrdiff_t>(kk) + 1, cur.end(),
                                  std::size_t{1}, std::multiplies<>());
    Vector next(shape.left * shape.right);
    kernels::omp::contract_mode(src, shape, v, next);
    buffer = std::move(next);
    src = buffer;
    cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(kk));
  }
  if (m == 1) return Vector(T.data().begin(), T.data().end());
  return buffer;
}

double full_contract(const DenseTensor& T, std::span<const VectorView> vectors) {
  check_vectors(T, vectors);
  const Vector first = contract_except(T, vectors.subspan(1), 0);
  double acc = 0.0;
  for (std::size_t i = 0; i < first.size(); ++i) acc += first[i] * vectors[0][i];
  return acc;
}

DenseTensor cp_reconstruct(const FactorSet& F, const Dims& dims) {
  if (F.order() != dims.size()) throw DimensionMismatch("factor set order does not match dims");
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (static_cast<std::size_t>(F.factors[j].rows()) != dims[j])
      throw DimensionMismatch("factor rows for mode " + std::to_string(j) + " do not match dims");
    if (static_cast<std::size_t>(F.factors[j].cols()) != F.rank())
      throw DimensionMismatch("factor column count does not match rank");
  }
  DenseTensor out(dims);
  std::vector<VectorView> head(dims.size() - 1);
  for (std::size_t r = 0; r < F.rank(); ++r) {
    if (F.weights[r] == 0.0) continue;
    for (std::size_t j = 0; j + 1 < dims.size(); ++j) head[j] = F.column(j, r);
    const Vector prefix = outer(head);
    kernels::omp::add_outer(out.mutable_data(), F.weights[r], prefix,
                            F.column(dims.size() - 1, r));
  }
  return out;
}

DenseTensor subtract_rank_one(const DenseTensor& T, double w,
                              std::span<const VectorView> vectors) {
  check_vectors(T, vectors);
  for (const auto& v : vectors) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-8)
      throw InvalidArgument("subtract_rank_one requires unit-norm vectors");
  }
  DenseTensor out = T;
  if (w == 0.0) return out;
  const Vector prefix = outer(vectors.first(vectors.size() - 1));
  kernels::omp::add_outer(out.mutable_data(), -w, prefix, vectors.back());
  return out;
}

double frobenius_norm(const DenseTensor& T) {
  return std::sqrt(kernels::omp::sum_squares(T.data()));
}

}  // namespace dtc
