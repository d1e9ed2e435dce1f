#include "dtc/stf.hpp"

#include <cmath>
#include <random>
#include <string>

#include "dtc/errors.hpp"
#include "dtc/proxops.hpp"

namespace dtc {

namespace {

struct Attempt {
  std::vector<Vector> factors;
  double weight = 0.0;
  int iterations = 0;
};

// leader[j] == j for untied modes and group leaders.
std::vector<std::size_t> leaders(const ConstraintSpec& spec, std::size_t order) {
  std::vector<std::size_t> lead(order);
  for (std::size_t j = 0; j < order; ++j) lead[j] = j;
  for (const auto& group : spec.tied_modes) {
    std::size_t first = order;
    for (auto j : group) first = std::min(first, j);
    for (auto j : group) lead[j] = first;
  }
  return lead;
}

std::vector<VectorView> views(const std::vector<Vector>& vs) {
  return {vs.begin(), vs.end()};
}

Vector random_unit(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(d);
  for (auto& x : v) x = g(rng);
  return normalize(v);
}

Attempt fit_rank_one(const DenseTensor& T, const ConstraintSpec& spec,
                     const std::vector<std::size_t>& lead, std::uint64_t stream) {
  const std::size_t m = T.order();
  std::mt19937_64 rng(spec.seed + stream);
  Attempt a;
  a.factors.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    a.factors[j] = lead[j] == j ? random_unit(T.dim(j), rng) : Vector{};
  for (std::size_t j = 0; j < m; ++j)
    if (lead[j] != j) a.factors[j] = a.factors[lead[j]];

  for (int it = 1; it <= spec.max_iters; ++it) {
    const std::vector<Vector> previous = a.factors;
    for (std::size_t j = 0; j < m; ++j) {
      if (lead[j] != j) continue;
      const auto current = views(a.factors);
      a.factors[j] = power_update(T, current, j, spec);
      for (std::size_t f = j + 1; f < m; ++f)
        if (lead[f] == j) a.factors[f] = a.factors[j];
    }
    a.iterations = it;
    double change = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < a.factors[j].size(); ++i) {
        const double diff = a.factors[j][i] - previous[j][i];
        change += diff * diff;
      }
    if (change <= spec.conv_tol) break;
  }
  a.weight = full_contract(T, views(a.factors));
  return a;
}

}  // namespace

void ConstraintSpec::validate(const Dims& dims) const {
  const std::size_t m = dims.size();
  if (!sparsity.empty()) {
    if (sparsity.size() != m)
      throw InvalidArgument("sparsity needs one entry per mode (" + std::to_string(m) + ")");
    for (std::size_t j = 0; j < m; ++j)
      if (sparsity[j] < 1 || sparsity[j] > dims[j])
        throw InvalidArgument("sparsity for mode " + std::to_string(j) + " must lie in [1, " +
                              std::to_string(dims[j]) + "]");
  }
  if (!fusion.empty()) {
    if (fusion.size() != m)
      throw InvalidArgument("fusion needs one entry per mode (" + std::to_string(m) + ")");
    for (double l : fusion)
      if (!(l >= 0.0)) throw InvalidArgument("fusion weights must be nonnegative");
  }
  std::vector<bool> seen(m, false);
  for (const auto& group : tied_modes) {
    if (group.empty()) throw InvalidArgument("empty tied-mode group");
    for (auto j : group) {
      if (j >= m) throw InvalidArgument("tied mode index out of range");
      if (seen[j]) throw InvalidArgument("mode " + std::to_string(j) + " appears in two tied groups");
      seen[j] = true;
      if (dims[j] != dims[group.front()])
        throw InvalidArgument("tied modes must share the same dimension");
    }
  }
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (n_restarts < 1) throw InvalidArgument("n_restarts must be at least 1");
  if (!(conv_tol >= 0.0)) throw InvalidArgument("conv_tol must be nonnegative");
}

ConstraintSpec ConstraintSpec::resolved(const Dims& dims) const {
  validate(dims);
  ConstraintSpec out = *this;
  if (out.sparsity.empty()) out.sparsity.assign(dims.begin(), dims.end());
  if (out.fusion.empty()) out.fusion.assign(dims.size(), 0.0);
  return out;
}

Vector power_update(const DenseTensor& T, std::span<const VectorView> current, std::size_t mode,
                    const ConstraintSpec& spec) {
  const std::size_t m = T.order();
  if (current.size() != m) throw DimensionMismatch("power_update needs one vector per mode");
  if (mode >= m) throw InvalidArgument("mode index out of range");
  std::vector<VectorView> others;
  others.reserve(m - 1);
  for (std::size_t k = 0; k < m; ++k)
    if (k != mode) others.push_back(current[k]);
  const std::size_t s = spec.sparsity.empty() ? T.dim(mode) : spec.sparsity.at(mode);
  const double lambda = spec.fusion.empty() ? 0.0 : spec.fusion.at(mode);
  const Vector direction = normalize(contract_except(T, others, mode));
  return normalize(truncatefuse(direction, s, lambda));
}

StfResult stf_decompose(const DenseTensor& T, std::size_t rank, const ConstraintSpec& spec_in) {
  if (rank < 1) throw InvalidArgument("rank must be at least 1");
  const ConstraintSpec spec = spec_in.resolved(T.dims());
  const std::size_t m = T.order();
  const auto lead = leaders(spec, m);
  const auto restarts = static_cast<std::uint64_t>(spec.n_restarts);
  // A degenerate attempt is replaced by a fresh draw; at most this many
  // attempts per rank.
  const std::uint64_t budget = 2 * restarts;

  StfResult result;
  result.factors.weights.assign(rank, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    result.factors.factors.emplace_back(static_cast<Eigen::Index>(T.dim(j)),
                                        static_cast<Eigen::Index>(rank));

  DenseTensor residual = T;
  for (std::size_t r = 0; r < rank; ++r) {
    Attempt best;
    bool have_best = false;
    int best_index = -1;
    int degenerate = 0;
    std::uint64_t successes = 0;
    for (std::uint64_t attempt = 0; attempt < budget && successes < restarts; ++attempt) {
      Attempt a;
      try {
        a = fit_rank_one(residual, spec, lead, r * budget + attempt);
      } catch (const DegenerateVector&) {
        ++degenerate;
        continue;
      }
      ++successes;
      if (!have_best || std::abs(a.weight) > std::abs(best.weight)) {
        best = std::move(a);
        best_index = static_cast<int>(attempt);
        have_best = true;
      }
    }
    if (!have_best)
      throw DegenerateVector("rank " + std::to_string(r + 1) +
                             ": every initialization collapsed to a zero vector");

    result.factors.weights[r] = best.weight;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < T.dim(j); ++i)
        result.factors.factors[j](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) =
            best.factors[j][i];
    residual = subtract_rank_one(residual, best.weight, views(best.factors));
    result.report.iterations.push_back(best.iterations);
    result.report.chosen_restart.push_back(best_index);
    result.report.degenerate_attempts.push_back(degenerate);
  }
  result.report.residual_norm = frobenius_norm(residual);
  result.report.objective = objective_value(T, result.factors, spec);
  return result;
}

double objective_value(const DenseTensor& T, const FactorSet& F, const ConstraintSpec& spec_in) {
  const ConstraintSpec spec = spec_in.resolved(T.dims());
  const DenseTensor fit = cp_reconstruct(F, T.dims());
  double rss = 0.0;
  const auto a = T.data();
  const auto b = fit.data();
  for (std::size_t i = 0; i < a.size(); ++i) rss += (a[i] - b[i]) * (a[i] - b[i]);
  double penalty = 0.0;
  for (std::size_t j = 0; j < F.order(); ++j) {
    if (spec.fusion[j] == 0.0) continue;
    for (std::size_t r = 0; r < F.rank(); ++r)
      penalty += spec.fusion[j] * total_variation(F.column(j, r));
  }
  return rss + penalty;
}

}  // namespace dtc
