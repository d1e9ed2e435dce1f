#include "dtc/simgen.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "dtc/errors.hpp"
#include "dtc/kernels.hpp"

namespace dtc {

CovKind parse_cov_kind(const std::string& name) {
  if (name == "identity") return CovKind::identity;
  if (name == "ar") return CovKind::ar;
  if (name == "exchangeable" || name == "exch") return CovKind::exchangeable;
  throw InvalidArgument("unknown covariance kind '" + name + "'");
}

std::string to_string(CovKind kind) {
  switch (kind) {
    case CovKind::identity: return "identity";
    case CovKind::ar: return "ar";
    case CovKind::exchangeable: return "exchangeable";
  }
  return "?";
}

Eigen::MatrixXd make_cov(const CovarianceSpec& spec) {
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw InvalidArgument("rho must lie in [0, 1)");
  if (spec.dim < 1) throw InvalidArgument("covariance dimension must be positive");
  const auto d = static_cast<Eigen::Index>(spec.dim);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(d, d);
  if (spec.kind == CovKind::identity) return S;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      S(i, j) = spec.kind == CovKind::ar ? std::pow(spec.rho, static_cast<double>(std::abs(i - j)))
                                         : spec.rho;
    }
  return S;
}

namespace {

DenseTensor sample_tensor_normal(const DenseTensor& mean, std::span<const CovarianceSpec> covs,
                                 std::mt19937_64& rng) {
  if (covs.size() != mean.order()) throw DimensionMismatch("need one covariance per mode");
  for (std::size_t j = 0; j < covs.size(); ++j)
    if (covs[j].dim != mean.dim(j)) throw DimensionMismatch("covariance dim does not match mode");

  std::normal_distribution<double> g;
  Vector z(mean.size());
  for (auto& x : z) x = g(rng);

  const Dims& dims = mean.dims();
  for (std::size_t j = 0; j < covs.size(); ++j) {
    if (covs[j].kind == CovKind::identity) continue;
    const Eigen::MatrixXd S = make_cov(covs[j]);
    Eigen::LLT<Eigen::MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) throw InvalidArgument("covariance is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    kernels::ModeView shape;
    shape.left = std::accumulate(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(j),
                                 std::size_t{1}, std::multiplies<>());
    shape.mid = dims[j];
    shape.right = std::accumulate(dims.begin() + static_cast<std::ptrdiff_t>(j) + 1, dims.end(),
                                  std::size_t{1}, std::multiplies<>());
    Vector out(z.size());
    kernels::omp::mode_multiply(z, shape, L, out);
    z = std::move(out);
  }
  const auto m = mean.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += m[i];
  return DenseTensor(dims, std::move(z));
}

Vector normalized(Vector v, double& norm) {
  norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

// Sample-mode sign pattern of component r over four clusters.
const std::array<int, 4>& cluster_pattern(std::size_t r) {
  static const std::array<std::array<int, 4>, 3> patterns{{
      {+1, +1, -1, -1},
      {-1, +1, +1, -1},
      {+1, -1, +1, -1},
  }};
  return patterns[r % 3];
}

std::vector<int> labels_from_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<int> labels;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    labels.insert(labels.end(), sizes[k], static_cast<int>(k + 1));
  return labels;
}

// Assembles truth factors from unnormalized components (one list of vectors
// per rank, one vector per mode), then draws the noisy samples.
SimDataset assemble(const std::vector<std::vector<Vector>>& components,
                    std::span<const CovarianceSpec> covs, std::uint64_t seed, SimDesign design,
                    std::vector<int> truth) {
  const std::size_t rank = components.size();
  const std::size_t order = components.front().size();
  SimDataset ds;
  FactorSet& F = ds.truth_factors;
  F.weights.assign(rank, 1.0);
  for (std::size_t j = 0; j < order; ++j)
    F.factors.emplace_back(static_cast<Eigen::Index>(components[0][j].size()),
                           static_cast<Eigen::Index>(rank));
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t j = 0; j < order; ++j) {
      double norm = 0.0;
      const Vector unit = normalized(components[r][j], norm);
      F.weights[r] *= norm;
      for (std::size_t i = 0; i < unit.size(); ++i)
        F.factors[j](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = unit[i];
    }

  const Dims dims = F.dims();
  const DenseTensor signal = cp_reconstruct(F, dims);
  const std::size_t n = dims.back();
  std::mt19937_64 rng(seed);
  ds.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const DenseTensor mean = last_mode_slice(signal, i);
    ds.samples.push_back(sample_tensor_normal(mean, covs, rng));
  }
  ds.stacked = stack_samples(ds.samples);
  Vector noise(signal.size());
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = ds.stacked[i] - signal[i];
  ds.noise = DenseTensor(dims, std::move(noise));
  ds.truth_assignment = std::move(truth);
  ds.design = std::move(design);
  return ds;
}

Vector sample_component(const std::vector<std::size_t>& sizes, double mu, std::size_t r) {
  const auto& pattern = cluster_pattern(r);
  Vector v;
  for (std::size_t k = 0; k < sizes.size(); ++k) v.insert(v.end(), sizes[k], pattern[k] * mu);
  return v;
}

std::vector<double> default_ratios(std::span<const double> ratios) {
  if (ratios.empty()) return {1.0, 1.0, 1.0, 1.0};
  return {ratios.begin(), ratios.end()};
}

}  // namespace

DenseTensor sample_tensor_normal(const DenseTensor& mean, std::span<const CovarianceSpec> covs,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_tensor_normal(mean, covs, rng);
}

std::vector<std::size_t> cluster_sizes(std::size_t n, std::span<const double> ratios) {
  if (ratios.empty()) throw InvalidArgument("cluster ratios are empty");
  double total = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw InvalidArgument("cluster ratios must be positive");
    total += r;
  }
  std::vector<std::size_t> sizes;
  std::size_t prev = 0;
  double cum = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    cum += ratios[k];
    const std::size_t bound =
        k + 1 == ratios.size() ? n
                               : static_cast<std::size_t>(std::floor(static_cast<double>(n) * cum / total));
    if (bound <= prev) throw InvalidArgument("cluster ratios leave an empty cluster");
    sizes.push_back(bound - prev);
    prev = bound;
  }
  return sizes;
}

SimDataset gen_2d(std::size_t n, std::size_t d1, double mu, CovarianceSpec cov,
                  std::span<const double> cluster_ratios, std::uint64_t seed, std::size_t rank) {
  if (rank < 2) throw InvalidArgument("gen_2d needs rank >= 2");
  if (d1 < 4 * rank)
    throw InvalidArgument("d1 = " + std::to_string(d1) + " cannot host the " +
                          std::to_string(4 * rank) + "-entry support");
  if (n < 4) throw InvalidArgument("gen_2d needs N >= 4");
  const auto ratios = default_ratios(cluster_ratios);
  if (ratios.size() != 4) throw InvalidArgument("the 2d design has four clusters");
  const auto sizes = cluster_sizes(n, ratios);

  std::vector<std::vector<Vector>> comps(rank);
  for (std::size_t r = 0; r < rank; ++r) {
    Vector feat(d1, 0.0);
    const std::size_t o = 4 * r;
    feat[o] = mu;
    feat[o + 1] = -mu;
    feat[o + 2] = 0.5 * mu;
    feat[o + 3] = -0.5 * mu;
    comps[r] = {feat, feat, sample_component(sizes, mu, r)};
  }
  cov.dim = d1;
  const std::vector<CovarianceSpec> covs{cov, cov};
  SimDesign design{"2d", n, d1, mu, rank, cov, ratios, sizes, seed};
  return assemble(comps, covs, seed, std::move(design), labels_from_sizes(sizes));
}

SimDataset gen_3d(std::size_t n, std::size_t d, double mu, std::span<const double> cluster_ratios,
                  std::uint64_t seed) {
  if (d < 20) throw InvalidArgument("gen_3d needs d >= 20");
  if (n < 4) throw InvalidArgument("gen_3d needs N >= 4");
  const auto ratios = default_ratios(cluster_ratios);
  if (ratios.size() != 4) throw InvalidArgument("the 3d design has four clusters");
  const auto sizes = cluster_sizes(n, ratios);

  const std::size_t b = d / 4;
  Vector first(d, 0.0), second(d, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    first[i] = mu;
    first[b + i] = -mu;
    second[d - 2 * b + i] = mu;
    second[d - b + i] = -mu;
  }
  std::vector<std::vector<Vector>> comps{
      {first, first, first, sample_component(sizes, mu, 0)},
      {second, second, second, sample_component(sizes, mu, 1)},
  };
  CovarianceSpec cov{CovKind::identity, 0.0, d};
  const std::vector<CovarianceSpec> covs{cov, cov, cov};
  SimDesign design{"3d", n, d, mu, 2, cov, ratios, sizes, seed};
  return assemble(comps, covs, seed, std::move(design), labels_from_sizes(sizes));
}

}  // namespace dtc
