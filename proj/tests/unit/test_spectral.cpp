#include <gtest/gtest.h>

#include <random>

#include "opcond/error.hpp"
#include "opcond/linear_operator.hpp"
#include "opcond/spectral.hpp"

using namespace opcond;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double spread) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = g(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd ev(n);
  for (int i = 0; i < n; ++i) ev[i] = std::pow(spread, static_cast<double>(i) / (n - 1));
  return Q * ev.asDiagonal() * Q.transpose();
}

}  // namespace

TEST(Lanczos, IdentityHasUnitCondition) {
  const SpectralReport r = lanczos_condition(LinearOperator::identity(20), LinearOperator::identity(20));
  EXPECT_NEAR(r.kappa, 1.0, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(Lanczos, TwoByTwoDiagonal) {
  Eigen::VectorXd d(2);
  d << 1.0, 4.0;
  const SpectralReport r = lanczos_condition(LinearOperator::identity(2), LinearOperator::diagonal(d));
  EXPECT_NEAR(r.lambda_min, 1.0, 1e-12);
  EXPECT_NEAR(r.lambda_max, 4.0, 1e-12);
  EXPECT_NEAR(r.kappa, 4.0, 1e-12);
}

TEST(Lanczos, ScalarOperator) {
  Eigen::VectorXd d(1);
  d << 3.0;
  const SpectralReport r = lanczos_condition(LinearOperator::diagonal(d), LinearOperator::identity(1));
  EXPECT_NEAR(r.kappa, 1.0, 1e-15);
  EXPECT_NEAR(r.lambda_max, 3.0, 1e-14);
}

TEST(Lanczos, MatchesDenseOracle) {
  std::mt19937_64 rng(21);
  const Eigen::MatrixXd A = random_spd(rng, 300, 1e3);
  const Eigen::MatrixXd G = random_spd(rng, 300, 10.0);
  const SpectralReport r = lanczos_condition(LinearOperator::from_dense(G), LinearOperator::from_dense(A));
  const Eigen::VectorXd ev = dense_eig_oracle(G, A);
  EXPECT_NEAR(r.lambda_max, ev.maxCoeff(), 1e-2 * ev.maxCoeff());
  EXPECT_NEAR(r.lambda_min, ev.minCoeff(), 1e-2 * ev.minCoeff());
  EXPECT_NEAR(r.kappa, ev.maxCoeff() / ev.minCoeff(), 1e-2 * ev.maxCoeff() / ev.minCoeff());
}

TEST(Lanczos, RitzValuesMonotone) {
  std::mt19937_64 rng(22);
  const Eigen::MatrixXd A = random_spd(rng, 80, 50.0);
  LanczosOptions o;
  o.tol = 1e-12;
  const SpectralReport r = lanczos_condition(LinearOperator::identity(80), LinearOperator::from_dense(A), o);
  ASSERT_EQ(r.history_min.size(), r.history_max.size());
  ASSERT_GT(r.history_min.size(), 2u);
  for (std::size_t k = 1; k < r.history_min.size(); ++k) {
    EXPECT_LE(r.history_min[k], r.history_min[k - 1] * (1 + 1e-12));
    EXPECT_GE(r.history_max[k], r.history_max[k - 1] * (1 - 1e-12));
  }
}

TEST(Lanczos, SeedInvariance) {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXd A = random_spd(rng, 120, 30.0);
  LanczosOptions a, b;
  b.seed = 1234;
  const double ka = lanczos_condition(LinearOperator::identity(120), LinearOperator::from_dense(A), a).kappa;
  const double kb = lanczos_condition(LinearOperator::identity(120), LinearOperator::from_dense(A), b).kappa;
  EXPECT_NEAR(ka, kb, 1e-3 * ka);
}

TEST(Lanczos, DeterministicForFixedSeed) {
  std::mt19937_64 rng(24);
  const Eigen::MatrixXd A = random_spd(rng, 60, 20.0);
  const SpectralReport a = lanczos_condition(LinearOperator::identity(60), LinearOperator::from_dense(A));
  const SpectralReport b = lanczos_condition(LinearOperator::identity(60), LinearOperator::from_dense(A));
  EXPECT_EQ(a.kappa, b.kappa);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Lanczos, IterationCapReported) {
  std::mt19937_64 rng(25);
  const Eigen::MatrixXd A = random_spd(rng, 200, 1e4);
  LanczosOptions o;
  o.max_iter = 3;
  o.tol = 1e-14;
  const SpectralReport r = lanczos_condition(LinearOperator::identity(200), LinearOperator::from_dense(A), o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3);
}

TEST(Lanczos, Errors) {
  EXPECT_THROW(lanczos_condition(LinearOperator::identity(3), LinearOperator::identity(4)), Error);
  Eigen::VectorXd d(3);
  d << 1.0, -2.0, 3.0;
  try {
    lanczos_condition(LinearOperator::diagonal(d), LinearOperator::identity(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::indefinite);
  }
}

TEST(DenseOracle, GeneralizedEigenvalues) {
  Eigen::MatrixXd A(2, 2), G(2, 2);
  A << 2.0, 0.0, 0.0, 8.0;
  G << 1.0, 0.0, 0.0, 0.5;
  const Eigen::VectorXd ev = dense_eig_oracle(G, A);
  EXPECT_NEAR(ev[0], 2.0, 1e-14);
  EXPECT_NEAR(ev[1], 4.0, 1e-14);
  A(1, 1) = -1.0;
  try {
    dense_eig_oracle(G, A);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::factorization);
  }
}

TEST(Pcg, ExactPreconditionerConvergesInOneStep) {
  std::mt19937_64 rng(26);
  const Eigen::MatrixXd A = random_spd(rng, 40, 100.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(40);
  const PcgResult r = pcg_solve(LinearOperator::from_dense(A), LinearOperator::from_dense(Eigen::MatrixXd(A.inverse())), b,
                                1e-10, 100);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_LT((A * r.x - b).norm(), 1e-10 * b.norm());
}

TEST(Pcg, IterationsBoundedByCondition) {
  std::mt19937_64 rng(27);
  const Eigen::MatrixXd A = random_spd(rng, 200, 100.0);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(200);
  const PcgResult r = pcg_solve(LinearOperator::from_dense(A), LinearOperator::identity(200),
                                b, 1e-8, 1000);
  EXPECT_TRUE(r.converged);
  // sqrt(kappa)/2 ln(2/eps) with kappa = 100.
  EXPECT_LE(r.iterations, 100);
  EXPECT_EQ(r.residual_history.size(), static_cast<std::size_t>(r.iterations) + 1);
  EXPECT_LE(r.residual_history.back(), 1e-8);
}

TEST(Pcg, ZeroRightHandSide) {
  const PcgResult r = pcg_solve(LinearOperator::identity(5), LinearOperator::identity(5), Eigen::VectorXd::Zero(5), 1e-8, 10);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.x.norm(), 0.0);
}

TEST(LinearOperatorTest, RankOneUpdate) {
  const auto M = std::make_shared<const Eigen::MatrixXd>(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd m(3);
  m << 1.0, 2.0, 3.0;
  const LinearOperator op = LinearOperator::rank_one_update(M, m, 0.5);
  const Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(3, 3) + 0.5 * m * m.transpose();
  EXPECT_LT((op.dense() - expected).norm(), 1e-15);
}

TEST(LinearOperatorTest, ShapeMismatch) {
  try {
    LinearOperator::identity(3).apply(Eigen::VectorXd(Eigen::VectorXd::Ones(4)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape_mismatch);
  }
}

TEST(LinearOperatorTest, SparseAndDenseAgree) {
  Eigen::MatrixXd d(3, 3);
  d << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const Eigen::SparseMatrix<double> s = d.sparseView();
  EXPECT_EQ(LinearOperator::from_sparse(s).dense(), LinearOperator::from_dense(d).dense());
}
