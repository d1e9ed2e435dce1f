#include "dtc/proxops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dtc/errors.hpp"

namespace dtc {

std::vector<double> truncate(std::span<const double> v, std::size_t tau) {
  if (tau > v.size())
    throw InvalidArgument("truncate: tau " + std::to_string(tau) + " exceeds length " +
                          std::to_string(v.size()));
  if (tau == v.size()) return {v.begin(), v.end()};
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Stable by index on equal magnitude.
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t k = 0; k < tau; ++k) out[idx[k]] = v[idx[k]];
  return out;
}

// Dynamic programming for 1D TV denoising (Johnson, 2013):
//   min_b 1/2 sum (y_i - b_i)^2 + lam sum |b_{i+1} - b_i|.
// The derivative of each partial objective is piecewise linear; it is kept as
// a sorted list of knots with slope/intercept increments, and the forward
// pass records the clipping interval [lo_k, hi_k] for b_k given b_{k+1}.
namespace {

void tv_dp(std::span<const double> y, double lam, std::span<double> beta) {
  const std::size_t n = y.size();
  if (n == 1 || lam == 0.0) {
    std::copy(y.begin(), y.end(), beta.begin());
    return;
  }
  std::vector<double> x(2 * n), a(2 * n), b(2 * n);
  std::vector<double> tm(n - 1), tp(n - 1);

  tm[0] = -lam + y[0];
  tp[0] = lam + y[0];
  std::ptrdiff_t l = static_cast<std::ptrdiff_t>(n) - 1;
  std::ptrdiff_t r = static_cast<std::ptrdiff_t>(n);
  x[l] = tm[0];
  x[r] = tp[0];
  a[l] = 1.0;
  b[l] = -y[0] + lam;
  a[r] = -1.0;
  b[r] = y[0] + lam;
  double afirst = 1.0, bfirst = -lam - y[1];
  double alast = -1.0, blast = -lam + y[1];

  for (std::size_t k = 1; k + 1 < n; ++k) {
    double alo = afirst, blo = bfirst;
    std::ptrdiff_t lo = l;
    for (; lo <= r; ++lo) {
      if (alo * x[lo] + blo > -lam) break;
      alo += a[lo];
      blo += b[lo];
    }
    tm[k] = (-lam - blo) / alo;
    l = lo - 1;
    x[l] = tm[k];

    double ahi = alast, bhi = blast;
    std::ptrdiff_t hi = r;
    for (; hi >= l; --hi) {
      if (-ahi * x[hi] - bhi < lam) break;
      ahi += a[hi];
      bhi += b[hi];
    }
    tp[k] = (lam + bhi) / (-ahi);
    r = hi + 1;
    x[r] = tp[k];

    a[l] = alo;
    b[l] = blo + lam;
    a[r] = ahi;
    b[r] = bhi + lam;
    afirst = 1.0;
    bfirst = -lam - y[k + 1];
    alast = -1.0;
    blast = -lam + y[k + 1];
  }

  double alo = afirst, blo = bfirst;
  for (std::ptrdiff_t lo = l; lo <= r; ++lo) {
    if (alo * x[lo] + blo > 0.0) break;
    alo += a[lo];
    blo += b[lo];
  }
  beta[n - 1] = -blo / alo;
  for (std::size_t k = n - 1; k-- > 0;) {
    if (beta[k + 1] > tp[k])
      beta[k] = tp[k];
    else if (beta[k + 1] < tm[k])
      beta[k] = tm[k];
    else
      beta[k] = beta[k + 1];
  }
}

}  // namespace

std::vector<double> fuse(std::span<const double> v, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("fuse: lambda must be nonnegative");
  if (v.empty()) throw InvalidArgument("fuse: empty vector");
  std::vector<double> out(v.size());
  tv_dp(v, 0.5 * lambda, out);
  return out;
}

std::vector<double> truncatefuse(std::span<const double> v, std::size_t tau, double lambda) {
  if (tau > v.size()) throw InvalidArgument("truncatefuse: tau exceeds length");
  const auto fused = fuse(v, lambda);
  return truncate(fused, tau);
}

std::vector<double> normalize(std::span<const double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double n = std::sqrt(n2);
  if (!(n > kEpsZero)) throw DegenerateVector("cannot normalize a (near-)zero vector");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

double total_variation(std::span<const double> v) {
  double tv = 0.0;
  for (std::size_t j = 1; j < v.size(); ++j) tv += std::abs(v[j] - v[j - 1]);
  return tv;
}

double fuse_objective(std::span<const double> u, std::span<const double> v, double lambda) {
  double q = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) q += (u[i] - v[i]) * (u[i] - v[i]);
  return q + lambda * total_variation(u);
}

}  // namespace dtc
