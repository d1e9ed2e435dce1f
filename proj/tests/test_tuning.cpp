#include "doctest.h"

#include <cmath>
#include <random>

#include "dtc/errors.hpp"
#include "dtc/simgen.hpp"
#include "dtc/tuning.hpp"
#include "oracles.hpp"

using dtc::Dims;
using dtc::FactorSet;
using dtc::TuneGrid;

namespace {

FactorSet single(const std::vector<double>& col) {
  FactorSet F;
  F.weights = {1.0};
  F.factors = {Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()))};
  return F;
}

}  // namespace

TEST_CASE("degrees_of_freedom examples") {
  CHECK(dtc::degrees_of_freedom(single({0.5, 0.5, 0.0, 0.3})) == 2);
  CHECK(dtc::degrees_of_freedom(single({0.1, 0.2, 0.3, 0.4, -0.5})) == 5);
  CHECK(dtc::degrees_of_freedom(single({0.5, 0.5, 0.5, 0.5})) == 1);
  CHECK(dtc::degrees_of_freedom(single({0.0, 0.0})) == 0);
  CHECK(dtc::degrees_of_freedom(single({0.5, 0.5 + 1e-10, 0.7})) == 2);
  CHECK(dtc::degrees_of_freedom(single({0.5, 0.5 + 1e-6, 0.7})) == 3);
  CHECK_THROWS_AS(dtc::degrees_of_freedom(single({1.0}), -1.0), dtc::InvalidArgument);
}

TEST_CASE("degrees_of_freedom is bounded by the support size") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 50; ++t) {
    FactorSet F;
    const std::size_t R = 1 + rng() % 3;
    F.weights.assign(R, 1.0);
    std::size_t support = 0;
    for (int j = 0; j < 3; ++j) {
      Eigen::MatrixXd A(6, static_cast<Eigen::Index>(R));
      for (Eigen::Index i = 0; i < A.size(); ++i) {
        const auto roll = rng() % 4;
        A.data()[i] = roll == 0 ? 0.0 : static_cast<double>(roll) * 0.25;
        support += A.data()[i] != 0.0;
      }
      F.factors.push_back(A);
    }
    const auto df = dtc::degrees_of_freedom(F);
    CHECK(df <= support);
    CHECK(df <= 3 * R * 3);  // at most three distinct nonzero values per column here
  }
}

TEST_CASE("bic_score formula") {
  // zero factor set on a unit-norm tensor
  dtc::DenseTensor T(Dims{2, 2}, {0.5, 0.5, 0.5, 0.5});
  FactorSet Z;
  Z.weights = {0.0};
  Z.factors = {Eigen::MatrixXd::Zero(2, 1), Eigen::MatrixXd::Zero(2, 1)};
  CHECK(dtc::bic_score(T, Z) == doctest::Approx(std::log(1.0 / 4.0)).epsilon(1e-14));

  // perfect fit: clamped residual
  FactorSet P;
  P.weights = {1.0};
  P.factors = {Eigen::MatrixXd::Constant(2, 1, std::sqrt(0.5)), Eigen::MatrixXd::Constant(2, 1, std::sqrt(0.5))};
  const double pen = 2.0 * std::log(2.0) / 4.0 * 2.0;  // df = 1 + 1
  CHECK(dtc::bic_score(T, P) == doctest::Approx(std::log(dtc::kEpsRss / 4.0) + pen).epsilon(1e-12));

  // random instance against a direct evaluation
  std::mt19937_64 rng(103);
  const Dims d{3, 4, 5};
  const auto X = oracle::random_tensor(d, rng);
  FactorSet F;
  F.weights = {2.0, -1.0};
  for (auto dj : d) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(dj), 2);
    for (int r = 0; r < 2; ++r) {
      const auto c = oracle::random_unit(dj, rng);
      for (std::size_t i = 0; i < dj; ++i) A(static_cast<Eigen::Index>(i), r) = c[i];
    }
    F.factors.push_back(A);
  }
  double rss = 0.0;
  oracle::for_each_index(d, [&](const std::vector<std::size_t>& idx) {
    const double e = oracle::entry(X, idx) - oracle::reconstruct_entry(F, idx);
    rss += e * e;
  });
  const double logd = std::log(3.0) + std::log(4.0) + std::log(5.0);
  const double want = std::log(rss / 60.0) + logd / 60.0 * (3 + 3 + 4 + 4 + 5 + 5);
  CHECK(dtc::bic_score(X, F) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("bic increases with degrees of freedom at fixed residual") {
  const dtc::DenseTensor T(Dims{4}, {1.0, 0.0, 0.0, 0.0});
  // zero weights: both fits leave the whole tensor as residual
  auto a = single({0.0, 0.5, 0.5, std::sqrt(0.5)});
  auto c = single({0.0, 1.0, 0.0, 0.0});
  a.weights = c.weights = {0.0};
  CHECK(dtc::degrees_of_freedom(c) == 1);
  CHECK(dtc::degrees_of_freedom(a) == 2);
  CHECK(dtc::bic_score(T, c) < dtc::bic_score(T, a));
}

TEST_CASE("expand_grid ordering and resolution") {
  TuneGrid g;
  g.ranks = {2, 1};
  g.sparsity = {1.0, 0.5};
  g.lambdas = {0.1, 0.0};
  const auto pts = dtc::expand_grid(g, Dims{10, 8, 6});
  REQUIRE(pts.size() == 8);
  CHECK(pts.front().rank == 1);
  CHECK(pts.front().sparsity == std::vector<std::size_t>{5, 4, 3});
  CHECK(pts.front().fusion == std::vector<double>{0, 0, 0});
  CHECK(pts[1].fusion == std::vector<double>{0.1, 0.1, 0.1});
  CHECK(pts[2].sparsity == std::vector<std::size_t>{10, 8, 6});
  CHECK(pts.back().rank == 2);

  g.ranks = {1};
  g.sparsity = {0.5, 1.0};
  g.lambdas = {0.0};
  g.shared = false;
  g.sparse_modes = std::vector<std::size_t>{0, 1};
  const auto per = dtc::expand_grid(g, Dims{10, 8, 6});
  REQUIRE(per.size() == 4);
  CHECK(per[1].sparsity == std::vector<std::size_t>{5, 8, 6});

  g.sparsity_is_fraction = false;
  g.sparsity = {3};
  g.shared = true;
  CHECK(dtc::expand_grid(g, Dims{10, 8, 6}).front().sparsity == std::vector<std::size_t>{3, 3, 6});

  g.sparsity = {0.5};
  CHECK_THROWS_AS(dtc::expand_grid(g, Dims{10, 8, 6}), dtc::InvalidArgument);
  g.sparsity_is_fraction = true;
  g.sparsity = {1.5};
  CHECK_THROWS_AS(dtc::expand_grid(g, Dims{10, 8, 6}), dtc::InvalidArgument);
  g.sparsity = {};
  CHECK_THROWS_AS(dtc::expand_grid(g, Dims{10, 8, 6}), dtc::InvalidArgument);
}

TEST_CASE("select_model") {
  std::mt19937_64 rng(107);
  SUBCASE("singleton grid returns that point") {
    const auto T = oracle::random_tensor(Dims{4, 4, 5}, rng);
    TuneGrid g;
    g.ranks = {2};
    g.sparsity = {0.75};
    g.lambdas = {0.1};
    const auto sel = dtc::select_model(T, g, dtc::ConstraintSpec{});
    CHECK(sel.scores.size() == 1);
    CHECK(sel.best == 0);
    CHECK(sel.best_score().point.rank == 2);
    CHECK(sel.best_score().point.sparsity == std::vector<std::size_t>{3, 3, 4});
  }
  SUBCASE("noiseless rank 1 selects R = 1") {
    std::vector<std::vector<double>> v{oracle::random_unit(4, rng), oracle::random_unit(5, rng),
                                       oracle::random_unit(6, rng)};
    FactorSet F;
    F.weights = {3.0};
    for (const auto& c : v) F.factors.push_back(Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
    const auto T = dtc::cp_reconstruct(F, Dims{4, 5, 6});
    TuneGrid g;
    g.ranks = {1, 2};
    const auto sel = dtc::select_model(T, g, dtc::ConstraintSpec{});
    CHECK(sel.best_score().point.rank == 1);
  }
  SUBCASE("high-signal 3d instance selects R = 2") {
    const auto ds = dtc::gen_3d(50, 20, 0.8, {}, 5);
    TuneGrid g;
    g.ranks = {1, 2, 3};
    g.sparsity = {0.5, 1.0};
    g.lambdas = {0.0, 0.1};
    dtc::ConstraintSpec base;
    base.n_restarts = 1;
    const auto sel = dtc::select_model(ds.stacked, g, base);
    CHECK(sel.best_score().point.rank == 2);
  }
  SUBCASE("deterministic and tie-broken by grid order") {
    const auto T = oracle::random_tensor(Dims{4, 4, 4}, rng);
    TuneGrid g;
    g.ranks = {1};
    g.sparsity = {1.0, 1.0};  // duplicates collapse
    g.lambdas = {0.0, 0.05};
    dtc::ConstraintSpec base;
    base.seed = 3;
    const auto a = dtc::select_model(T, g, base);
    const auto b = dtc::select_model(T, g, base);
    CHECK(a.scores.size() == 2);
    CHECK(a.best == b.best);
    for (std::size_t i = 0; i < a.scores.size(); ++i) CHECK(a.scores[i].bic == b.scores[i].bic);
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < a.scores.size(); ++i)
      if (a.scores[i].bic < a.scores[argmin].bic) argmin = i;
    CHECK(a.best == argmin);
  }
}
