#include "dtc/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <vector>

#ifdef DTC_HAVE_OPENMP
#include <omp.h>
#endif

namespace dtc::kernels {

namespace {

// Reductions are summed in fixed-size blocks and then combined in block
// order, so the result does not depend on the number of threads.
constexpr std::size_t kReduceBlock = 4096;

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelThreshold = 1 << 15;

}  // namespace

namespace serial {

void contract_mode(std::span<const double> in, ModeView s,
                   std::span<const double> v, std::span<double> out) {
  assert(in.size() == s.left * s.mid * s.right);
  assert(v.size() == s.mid && out.size() == s.left * s.right);
  for (std::size_t l = 0; l < s.left; ++l) {
    const double* block = in.data() + l * s.mid * s.right;
    double* o = out.data() + l * s.right;
    if (s.right == 1) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s.mid; ++k) acc += v[k] * block[k];
      o[0] = acc;
      continue;
    }
    std::fill(o, o + s.right, 0.0);
    for (std::size_t k = 0; k < s.mid; ++k) {
      const double vk = v[k];
      const double* row = block + k * s.right;
      for (std::size_t r = 0; r < s.right; ++r) o[r] += vk * row[r];
    }
  }
}

void mode_multiply(std::span<const double> in, ModeView s,
                   const Eigen::MatrixXd& M, std::span<double> out) {
  assert(static_cast<std::size_t>(M.rows()) == s.mid);
  assert(static_cast<std::size_t>(M.cols()) == s.mid);
  for (std::size_t l = 0; l < s.left; ++l) {
    const double* block = in.data() + l * s.mid * s.right;
    double* oblock = out.data() + l * s.mid * s.right;
    for (std::size_t i = 0; i < s.mid; ++i) {
      double* o = oblock + i * s.right;
      std::fill(o, o + s.right, 0.0);
      for (std::size_t k = 0; k < s.mid; ++k) {
        const double m = M(i, k);
        if (m == 0.0) continue;
        const double* row = block + k * s.right;
        for (std::size_t r = 0; r < s.right; ++r) o[r] += m * row[r];
      }
    }
  }
}

void add_outer(std::span<double> data, double w, std::span<const double> prefix,
               std::span<const double> tail) {
  assert(data.size() == prefix.size() * tail.size());
  const std::size_t n = tail.size();
  for (std::size_t p = 0; p < prefix.size(); ++p) {
    const double a = w * prefix[p];
    if (a == 0.0) continue;
    double* row = data.data() + p * n;
    for (std::size_t k = 0; k < n; ++k) row[k] += a * tail[k];
  }
}

double sum_squares(std::span<const double> x) {
  double total = 0.0;
  for (std::size_t b = 0; b < x.size(); b += kReduceBlock) {
    const std::size_t e = std::min(x.size(), b + kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += x[i] * x[i];
    total += acc;
  }
  return total;
}

}  // namespace serial

namespace omp {

#ifdef DTC_HAVE_OPENMP

void contract_mode(std::span<const double> in, ModeView s,
                   std::span<const double> v, std::span<double> out) {
  if (in.size() < kParallelThreshold) return serial::contract_mode(in, s, v, out);
  assert(in.size() == s.left * s.mid * s.right);
  if (s.left >= static_cast<std::size_t>(thread_count())) {
    const auto left = static_cast<std::ptrdiff_t>(s.left);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t l = 0; l < left; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      serial::contract_mode(in.subspan(ul * s.mid * s.right, s.mid * s.right),
                            {1, s.mid, s.right}, v, out.subspan(ul * s.right, s.right));
    }
    return;
  }
  // Few outer blocks (contracting one of the leading modes): split the
  // contiguous `right` extent instead.
  const std::size_t chunk = 512;
  const auto nchunks = static_cast<std::ptrdiff_t>((s.right + chunk - 1) / chunk);
  for (std::size_t l = 0; l < s.left; ++l) {
    const double* block = in.data() + l * s.mid * s.right;
    double* o = out.data() + l * s.right;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
      const std::size_t r0 = static_cast<std::size_t>(c) * chunk;
      const std::size_t r1 = std::min(s.right, r0 + chunk);
      std::fill(o + r0, o + r1, 0.0);
      for (std::size_t k = 0; k < s.mid; ++k) {
        const double vk = v[k];
        const double* row = block + k * s.right;
        for (std::size_t r = r0; r < r1; ++r) o[r] += vk * row[r];
      }
    }
  }
}

void mode_multiply(std::span<const double> in, ModeView s,
                   const Eigen::MatrixXd& M, std::span<double> out) {
  if (in.size() * s.mid < kParallelThreshold) return serial::mode_multiply(in, s, M, out);
  const auto rows = static_cast<std::ptrdiff_t>(s.left * s.mid);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t li = 0; li < rows; ++li) {
    const std::size_t l = static_cast<std::size_t>(li) / s.mid;
    const std::size_t i = static_cast<std::size_t>(li) % s.mid;
    const double* block = in.data() + l * s.mid * s.right;
    double* o = out.data() + (l * s.mid + i) * s.right;
    std::fill(o, o + s.right, 0.0);
    for (std::size_t k = 0; k < s.mid; ++k) {
      const double m = M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (m == 0.0) continue;
      const double* row = block + k * s.right;
      for (std::size_t r = 0; r < s.right; ++r) o[r] += m * row[r];
    }
  }
}

void add_outer(std::span<double> data, double w, std::span<const double> prefix,
               std::span<const double> tail) {
  if (data.size() < kParallelThreshold) return serial::add_outer(data, w, prefix, tail);
  const std::size_t n = tail.size();
  const auto rows = static_cast<std::ptrdiff_t>(prefix.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < rows; ++p) {
    const double a = w * prefix[static_cast<std::size_t>(p)];
    if (a == 0.0) continue;
    double* row = data.data() + static_cast<std::size_t>(p) * n;
    for (std::size_t k = 0; k < n; ++k) row[k] += a * tail[k];
  }
}

double sum_squares(std::span<const double> x) {
  if (x.size() < kParallelThreshold) return serial::sum_squares(x);
  const std::size_t nblocks = (x.size() + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t s = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t e = std::min(x.size(), s + kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = s; i < e; ++i) acc += x[i] * x[i];
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

#else

void contract_mode(std::span<const double> in, ModeView s,
                   std::span<const double> v, std::span<double> out) {
  serial::contract_mode(in, s, v, out);
}
void mode_multiply(std::span<const double> in, ModeView s,
                   const Eigen::MatrixXd& M, std::span<double> out) {
  serial::mode_multiply(in, s, M, out);
}
void add_outer(std::span<double> data, double w, std::span<const double> prefix,
               std::span<const double> tail) {
  serial::add_outer(data, w, prefix, tail);
}
double sum_squares(std::span<const double> x) { return serial::sum_squares(x); }

#endif

}  // namespace omp

void set_thread_cap(int n) {
#ifdef DTC_HAVE_OPENMP
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
  (void)n;
#endif
}

int thread_count() {
#ifdef DTC_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace dtc::kernels
