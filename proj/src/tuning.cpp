#include "dtc/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "dtc/errors.hpp"
#include "dtc/kernels.hpp"

namespace dtc {

std::size_t degrees_of_freedom(const FactorSet& F, double value_tol) {
  if (!(value_tol >= 0.0)) throw InvalidArgument("value_tol must be nonnegative");
  std::size_t df = 0;
  std::vector<double> nz;
  for (std::size_t j = 0; j < F.order(); ++j)
    for (std::size_t r = 0; r < F.rank(); ++r) {
      nz.clear();
      for (double x : F.column(j, r))
        if (x != 0.0) nz.push_back(x);
      if (nz.empty()) continue;
      std::sort(nz.begin(), nz.end());
      std::size_t distinct = 1;
      for (std::size_t i = 1; i < nz.size(); ++i)
        if (nz[i] - nz[i - 1] > value_tol) ++distinct;
      df += distinct;
    }
  return df;
}

double bic_score(const DenseTensor& T, const FactorSet& F, double value_tol) {
  const DenseTensor fit = cp_reconstruct(F, T.dims());
  Vector diff(T.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = T[i] - fit[i];
  const double rss = kernels::omp::sum_squares(diff);
  const double total = static_cast<double>(T.size());
  double log_dims = 0.0;
  for (auto d : T.dims()) log_dims += std::log(static_cast<double>(d));
  return std::log(std::max(rss, kEpsRss) / total) +
         log_dims / total * static_cast<double>(degrees_of_freedom(F, value_tol));
}

void TuneGrid::validate(const Dims& dims) const {
  if (ranks.empty() || sparsity.empty() || lambdas.empty())
    throw InvalidArgument("tuning grid has an empty axis");
  for (auto r : ranks)
    if (r < 1) throw InvalidArgument("grid ranks must be positive");
  for (double s : sparsity) {
    if (sparsity_is_fraction && !(s > 0.0 && s <= 1.0))
      throw InvalidArgument("sparsity fractions must lie in (0, 1]");
    if (!sparsity_is_fraction && !(s >= 1.0))
      throw InvalidArgument("absolute sparsity levels must be at least 1");
  }
  for (double l : lambdas)
    if (!(l >= 0.0)) throw InvalidArgument("grid lambdas must be nonnegative");
  for (const auto* modes : {&sparse_modes, &fused_modes})
    if (*modes)
      for (auto j : **modes)
        if (j >= dims.size()) throw InvalidArgument("grid mode index out of range");
}

namespace {

std::size_t resolve_sparsity(double value, bool fraction, std::size_t d) {
  const double s = fraction ? std::ceil(value * static_cast<double>(d) - 1e-9) : std::floor(value);
  return std::clamp<std::size_t>(static_cast<std::size_t>(s), 1, d);
}

// Cartesian product of `choices` over `count` slots (or a single shared slot).
std::vector<std::vector<double>> combos(const std::vector<double>& choices, std::size_t count,
                                        bool shared) {
  if (shared || count == 0) {
    std::vector<std::vector<double>> out;
    for (double c : choices) out.push_back({c});
    return out;
  }
  std::vector<std::vector<double>> out{{}};
  for (std::size_t slot = 0; slot < count; ++slot) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : out)
      for (double c : choices) {
        auto p = prefix;
        p.push_back(c);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<GridPoint> expand_grid(const TuneGrid& grid, const Dims& dims) {
  grid.validate(dims);
  const std::size_t m = dims.size();
  std::vector<std::size_t> sparse_modes, fused_modes;
  if (grid.sparse_modes) {
    sparse_modes = *grid.sparse_modes;
  } else {
    for (std::size_t j = 0; j < m; ++j) sparse_modes.push_back(j);
  }
  if (grid.fused_modes) {
    fused_modes = *grid.fused_modes;
  } else {
    for (std::size_t j = 0; j < m; ++j) fused_modes.push_back(j);
  }

  auto ranks = grid.ranks;
  auto svals = grid.sparsity;
  auto lvals = grid.lambdas;
  std::sort(ranks.begin(), ranks.end());
  std::sort(svals.begin(), svals.end());
  std::sort(lvals.begin(), lvals.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  svals.erase(std::unique(svals.begin(), svals.end()), svals.end());
  lvals.erase(std::unique(lvals.begin(), lvals.end()), lvals.end());

  const auto scombos = combos(svals, sparse_modes.size(), grid.shared);
  const auto lcombos = combos(lvals, fused_modes.size(), grid.shared);

  std::vector<GridPoint> points;
  for (auto R : ranks)
    for (const auto& sc : scombos)
      for (const auto& lc : lcombos) {
        GridPoint p;
        p.rank = R;
        p.sparsity_value = sc;
        p.lambda_value = lc;
        p.sparsity.assign(dims.begin(), dims.end());
        p.fusion.assign(m, 0.0);
        for (std::size_t i = 0; i < sparse_modes.size(); ++i) {
          const std::size_t j = sparse_modes[i];
          p.sparsity[j] = resolve_sparsity(sc[grid.shared ? 0 : i], grid.sparsity_is_fraction, dims[j]);
        }
        for (std::size_t i = 0; i < fused_modes.size(); ++i)
          p.fusion[fused_modes[i]] = lc[grid.shared ? 0 : i];
        points.push_back(std::move(p));
      }
  return points;
}

ModelSelection select_model(const DenseTensor& T, const TuneGrid& grid,
                            const ConstraintSpec& base_spec) {
  const auto points = expand_grid(grid, T.dims());
  if (points.empty()) throw InvalidArgument("tuning grid is empty");
  base_spec.validate(T.dims());

  ModelSelection sel;
  sel.scores.resize(points.size());
  std::vector<FactorSet> fits(points.size());
  std::vector<std::exception_ptr> failures(points.size());
#pragma omp parallel for schedule(dynamic) if (kernels::thread_count() > 1)
  for (std::size_t i = 0; i < points.size(); ++i) {
    GridScore& sc = sel.scores[i];
    sc.point = points[i];
    ConstraintSpec spec = base_spec;
    spec.sparsity = points[i].sparsity;
    spec.fusion = points[i].fusion;
    try {
      auto res = stf_decompose(T, points[i].rank, spec);
      sc.df = degrees_of_freedom(res.factors);
      sc.rss = res.report.residual_norm * res.report.residual_norm;
      sc.bic = bic_score(T, res.factors);
      fits[i] = std::move(res.factors);
    } catch (const DegenerateVector&) {
      sc.degenerate = true;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  bool found = false;
  for (std::size_t i = 0; i < sel.scores.size(); ++i) {
    if (sel.scores[i].degenerate) continue;
    if (!found || sel.scores[i].bic < sel.scores[sel.best].bic) {
      sel.best = i;
      found = true;
    }
  }
  if (!found) throw DegenerateVector("every grid point produced a degenerate factorization");
  sel.best_factors = fits[sel.best];
  return sel;
}

}  // namespace dtc
