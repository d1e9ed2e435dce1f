#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerical paths; each oracle recomputes its quantity from the definition.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "dtc/tensor.hpp"

namespace oracle {

// Visits every multi-index of `dims` in last-index-fastest order.
inline void for_each_index(const dtc::Dims& dims,
                           const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(dims.size(), 0);
  while (true) {
    f(idx);
    std::size_t k = dims.size();
    while (k > 0) {
      --k;
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (dims.empty()) return;
  }
}

inline double entry(const dtc::DenseTensor& T, const std::vector<std::size_t>& idx) {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) flat = flat * T.dim(k) + idx[k];
  return T.data()[flat];
}

// sum over all indices with index[mode] == i of T[idx] * prod_{k != mode} vecs[k][idx_k]
inline std::vector<double> contract_except(const dtc::DenseTensor& T,
                                           const std::vector<std::vector<double>>& vecs,
                                           std::size_t mode) {
  std::vector<double> out(T.dim(mode), 0.0);
  for_each_index(T.dims(), [&](const std::vector<std::size_t>& idx) {
    double p = entry(T, idx);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (k != mode) p *= vecs[k][idx[k]];
    out[idx[mode]] += p;
  });
  return out;
}

inline double full_contract(const dtc::DenseTensor& T, const std::vector<std::vector<double>>& vecs) {
  double s = 0.0;
  for_each_index(T.dims(), [&](const std::vector<std::size_t>& idx) {
    double p = entry(T, idx);
    for (std::size_t k = 0; k < idx.size(); ++k) p *= vecs[k][idx[k]];
    s += p;
  });
  return s;
}

inline double reconstruct_entry(const dtc::FactorSet& F, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t r = 0; r < F.rank(); ++r) {
    double p = F.weights[r];
    for (std::size_t j = 0; j < idx.size(); ++j)
      p *= F.factors[j](static_cast<Eigen::Index>(idx[j]), static_cast<Eigen::Index>(r));
    s += p;
  }
  return s;
}

inline double fuse_objective(const std::vector<double>& u, const std::vector<double>& v,
                             double lambda) {
  double q = 0.0, tv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) q += (u[i] - v[i]) * (u[i] - v[i]);
  for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(u[i] - u[i - 1]);
  return q + lambda * tv;
}

// Exact 1D fused-lasso solution by enumeration. The optimum is piecewise
// constant; on a block B with left/right jump signs sl, sr its stationarity
// condition 2 sum_B (c - v_i) + lambda (sl - sr) = 0 gives c in closed form.
// Every (partition, sign pattern) candidate is a feasible point, and the true
// optimum is among them, so the lowest-objective candidate is the minimizer.
// 3^(d-1) candidates; intended for d <= 12.
inline std::vector<double> fuse_by_enumeration(const std::vector<double>& v, double lambda) {
  const std::size_t d = v.size();
  if (d == 1 || lambda == 0.0) return v;
  std::vector<double> best = v;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<int> code(d - 1, 0);  // 0: no break, 1: break going up, 2: break going down
  std::vector<double> u(d);
  while (true) {
    // blocks
    std::size_t start = 0;
    int left_sign = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const bool end = (i == d - 1) || code[i] != 0;
      if (!end) continue;
      const int right_sign = (i == d - 1) ? 0 : (code[i] == 1 ? 1 : -1);
      double mean = 0.0;
      for (std::size_t t = start; t <= i; ++t) mean += v[t];
      const double len = static_cast<double>(i - start + 1);
      mean /= len;
      // d/dc of lambda*|c - c_prev| is lambda*left_sign; of lambda*|c_next - c| is -lambda*right_sign
      const double c = mean - lambda * (left_sign - right_sign) / (2.0 * len);
      for (std::size_t t = start; t <= i; ++t) u[t] = c;
      start = i + 1;
      left_sign = right_sign;
    }
    const double obj = fuse_objective(u, v, lambda);
    if (obj < best_obj) {
      best_obj = obj;
      best = u;
    }
    std::size_t k = 0;
    while (k < code.size() && ++code[k] == 3) code[k++] = 0;
    if (k == code.size()) break;
  }
  return best;
}

inline std::vector<double> random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  double n = 0.0;
  for (auto& x : v) {
    x = g(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  for (auto& x : v) x /= n;
  return v;
}

inline dtc::DenseTensor random_tensor(const dtc::Dims& dims, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> data(dtc::num_elements(dims));
  for (auto& x : data) x = g(rng);
  return dtc::DenseTensor(dims, std::move(data));
}

// Pairwise co-membership disagreement, counted over all i < j.
template <class A, class B>
double clustering_error(const A& est, const B& truth) {
  const std::size_t n = est.size();
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((est[i] == est[j]) != (truth[i] == truth[j])) ++bad;
  return static_cast<double>(bad) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

}  // namespace oracle
