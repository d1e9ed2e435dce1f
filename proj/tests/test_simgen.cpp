#include "doctest.h"

#include <cmath>

#include "dtc/errors.hpp"
#include "dtc/simgen.hpp"

using dtc::CovarianceSpec;
using dtc::CovKind;
using dtc::DenseTensor;
using dtc::Dims;

TEST_CASE("make_cov") {
  CHECK(dtc::make_cov({CovKind::ar, 0.0, 4}) == Eigen::MatrixXd::Identity(4, 4));
  CHECK(dtc::make_cov({CovKind::ar, 0.5, 4})(0, 2) == doctest::Approx(0.25));
  Eigen::MatrixXd ex(3, 3);
  ex << 1, .2, .2, .2, 1, .2, .2, .2, 1;
  CHECK(dtc::make_cov({CovKind::exchangeable, 0.2, 3}).isApprox(ex, 1e-15));
  CHECK_THROWS_AS(dtc::make_cov({CovKind::ar, 1.0, 3}), dtc::InvalidArgument);
  CHECK_THROWS_AS(dtc::make_cov({CovKind::ar, -0.1, 3}), dtc::InvalidArgument);
  for (auto kind : {CovKind::ar, CovKind::exchangeable})
    for (double rho : {0.0, 0.3, 0.9, 0.99}) {
      const auto S = dtc::make_cov({kind, rho, 12});
      CHECK(S.isApprox(S.transpose()));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  CHECK(dtc::parse_cov_kind("ar") == CovKind::ar);
  CHECK_THROWS_AS(dtc::parse_cov_kind("banded"), dtc::InvalidArgument);
}

TEST_CASE("sample_tensor_normal moments") {
  const DenseTensor M(Dims{10, 100, 100});
  const std::vector<CovarianceSpec> covs{{CovKind::identity, 0, 10}, {CovKind::identity, 0, 100},
                                         {CovKind::identity, 0, 100}};
  const auto X = dtc::sample_tensor_normal(M, covs, 1);
  const double n = static_cast<double>(X.size());
  double mean = 0.0, sq = 0.0;
  for (double x : X.data()) mean += x;
  mean /= n;
  for (double x : X.data()) sq += (x - mean) * (x - mean);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) <= 0.1);
  CHECK(dtc::sample_tensor_normal(M, covs, 1) == X);
  CHECK_FALSE(dtc::sample_tensor_normal(M, covs, 2) == X);
}

TEST_CASE("sample_tensor_normal has Kronecker covariance") {
  const std::size_t d = 3;
  const std::vector<CovarianceSpec> covs{{CovKind::ar, 0.6, d}, {CovKind::exchangeable, 0.4, d}};
  const DenseTensor M(Dims{d, d});
  const int draws = 10000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(9, 9);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(9);
  std::vector<Eigen::VectorXd> samples;
  for (int t = 0; t < draws; ++t) {
    const auto X = dtc::sample_tensor_normal(M, covs, 1000 + static_cast<std::uint64_t>(t));
    Eigen::VectorXd v(9);
    // vec with the first index fastest
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) v(static_cast<Eigen::Index>(j * d + i)) = X[i * d + j];
    mean += v;
    samples.push_back(v);
  }
  mean /= draws;
  for (const auto& v : samples) acc += (v - mean) * (v - mean).transpose();
  acc /= draws - 1;
  const Eigen::MatrixXd S1 = dtc::make_cov(covs[0]);
  const Eigen::MatrixXd S2 = dtc::make_cov(covs[1]);
  Eigen::MatrixXd kron(9, 9);
  for (Eigen::Index a = 0; a < 3; ++a)
    for (Eigen::Index b = 0; b < 3; ++b) kron.block(a * 3, b * 3, 3, 3) = S2(a, b) * S1;
  CHECK((acc - kron).cwiseAbs().maxCoeff() <= 0.1);

  const std::vector<CovarianceSpec> wrong{{CovKind::ar, 0.6, d}};
  CHECK_THROWS_AS(dtc::sample_tensor_normal(M, wrong, 0), dtc::DimensionMismatch);
}

TEST_CASE("cluster_sizes") {
  CHECK(dtc::cluster_sizes(100, std::vector<double>{1, 1, 1, 1}) == std::vector<std::size_t>{25, 25, 25, 25});
  CHECK(dtc::cluster_sizes(50, std::vector<double>{1, 1, 1, 1}) == std::vector<std::size_t>{12, 13, 12, 13});
  CHECK(dtc::cluster_sizes(100, std::vector<double>{1, 2, 3, 4}) == std::vector<std::size_t>{10, 20, 30, 40});
  CHECK_THROWS_AS(dtc::cluster_sizes(3, std::vector<double>{1, 1, 1, 1}), dtc::InvalidArgument);
  CHECK_THROWS_AS(dtc::cluster_sizes(10, std::vector<double>{1, 0}), dtc::InvalidArgument);
}

TEST_CASE("gen_2d") {
  const auto ds = dtc::gen_2d(100, 20, 1.0, {}, {}, 3);
  CHECK(ds.samples.size() == 100);
  CHECK(ds.stacked.dims() == Dims{20, 20, 100});
  const auto& F = ds.truth_factors;
  CHECK(F.rank() == 2);
  // unnormalized first component is (1, -1, 0.5, -0.5, 0, ...) scaled by its norm
  const double n1 = std::sqrt(1 + 1 + 0.25 + 0.25);
  CHECK(F.factors[0](0, 0) * n1 == doctest::Approx(1.0));
  CHECK(F.factors[0](1, 0) * n1 == doctest::Approx(-1.0));
  CHECK(F.factors[0](2, 0) * n1 == doctest::Approx(0.5));
  CHECK(F.factors[0](3, 0) * n1 == doctest::Approx(-0.5));
  CHECK(F.factors[0](4, 0) == 0.0);
  CHECK(F.factors[0](4, 1) * n1 == doctest::Approx(1.0));
  CHECK(F.factors[0].col(0).norm() == doctest::Approx(1.0));
  CHECK(F.factors[2].col(0).norm() == doctest::Approx(1.0));
  CHECK(F.weights[0] == doctest::Approx(n1 * n1 * 10.0));

  std::vector<int> want;
  for (int k = 1; k <= 4; ++k) want.insert(want.end(), 25, k);
  CHECK(ds.truth_assignment == want);

  // noise equals data minus signal
  const auto signal = dtc::cp_reconstruct(F, ds.stacked.dims());
  for (std::size_t i = 0; i < signal.size(); i += 97)
    CHECK(ds.noise[i] == doctest::Approx(ds.stacked[i] - signal[i]).epsilon(1e-14));

  CHECK(dtc::gen_2d(100, 20, 1.0, {}, {}, 3).stacked == ds.stacked);
  CHECK_THROWS_AS(dtc::gen_2d(100, 7, 1.0, {}, {}, 3), dtc::InvalidArgument);
  CHECK_THROWS_AS(dtc::gen_2d(100, 20, 1.0, {}, std::vector<double>{1, 1}, 3), dtc::InvalidArgument);
  CHECK(dtc::gen_2d(40, 20, 1.0, {CovKind::ar, 0.5, 0}, {}, 3).design.cov.dim == 20);
  CHECK(dtc::gen_2d(40, 20, 1.0, {}, {}, 3, 4).truth_factors.rank() == 4);
}

TEST_CASE("gen_3d") {
  const auto ds = dtc::gen_3d(100, 20, 0.6, {}, 4);
  CHECK(ds.stacked.dims() == Dims{20, 20, 20, 100});
  const auto& F = ds.truth_factors;
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(F.factors[0](i, 0) > 0.0);
  for (Eigen::Index i = 5; i < 10; ++i) CHECK(F.factors[0](i, 0) < 0.0);
  for (Eigen::Index i = 10; i < 20; ++i) CHECK(F.factors[0](i, 0) == 0.0);
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(F.factors[1](i, 1) == 0.0);
  const auto& s = F.factors[3];
  for (Eigen::Index i = 0; i < 100; ++i) {
    const int want = (i < 25 || i >= 75) ? -1 : 1;
    CHECK((s(i, 1) > 0 ? 1 : -1) == want);
    CHECK((s(i, 0) > 0 ? 1 : -1) == (i < 50 ? 1 : -1));
  }
  int kmax = 0;
  for (int l : ds.truth_assignment) kmax = std::max(kmax, l);
  CHECK(kmax == 4);
  CHECK_THROWS_AS(dtc::gen_3d(100, 16, 0.6, {}, 4), dtc::InvalidArgument);
}
