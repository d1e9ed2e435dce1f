#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference, kept for testing and benchmarking, and an OpenMP version used by
// the library. Both take a tensor viewed as (left, mid, right) with `right`
// varying fastest, which covers any single mode of a last-index-fastest array.
namespace dtc::kernels {

struct ModeView {
  std::size_t left = 1;
  std::size_t mid = 1;
  std::size_t right = 1;
};

namespace serial {

// out[l, r] = sum_k v[k] * in[l, k, r]
void contract_mode(std::span<const double> in, ModeView shape,
                   std::span<const double> v, std::span<double> out);

// out[l, i, r] = sum_k M(i, k) * in[l, k, r]   (M is mid x mid)
void mode_multiply(std::span<const double> in, ModeView shape,
                   const Eigen::MatrixXd& M, std::span<double> out);

// data[p, k] += w * prefix[p] * tail[k]; data is |prefix| x |tail|.
void add_outer(std::span<double> data, double w, std::span<const double> prefix,
               std::span<const double> tail);

double sum_squares(std::span<const double> x);

}  // namespace serial

namespace omp {

void contract_mode(std::span<const double> in, ModeView shape,
                   std::span<const double> v, std::span<double> out);

void mode_multiply(std::span<const double> in, ModeView shape,
                   const Eigen::MatrixXd& M, std::span<double> out);

void add_outer(std::span<double> data, double w, std::span<const double> prefix,
               std::span<const double> tail);

double sum_squares(std::span<const double> x);

}  // namespace omp

// Caps the worker count used by the omp:: kernels and parallel loops
// elsewhere. n <= 0 restores the runtime default. No-op without OpenMP.
void set_thread_cap(int n);
int thread_count();

}  // namespace dtc::kernels
