#include <gtest/gtest.h>

#include <random>

#include "opcond/assembly.hpp"
#include "opcond/duals.hpp"
#include "opcond/error.hpp"
#include "opcond/precond.hpp"
#include "opcond/spectral.hpp"
#include "test_util.hpp"

using namespace opcond;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = g(rng);
  return x * x.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_positive(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

SparseMatrix random_incidence(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_int_distribution<int> pick(0, cols - 1);
  std::vector<Eigen::Triplet<double>> t;
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < 3; ++k) t.emplace_back(r, pick(rng), 1.0);
  SparseMatrix p(rows, cols);
  p.setFromTriplets(t.begin(), t.end(), [](double a, double) { return a; });
  return p;
}

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(PrecondConfig, Defaults) {
  EXPECT_DOUBLE_EQ(PrecondConfig::defaults(DualVariant::pwc).beta1, 0.65);
  EXPECT_DOUBLE_EQ(PrecondConfig::defaults(DualVariant::cpl).beta1, 0.34);
  EXPECT_DOUBLE_EQ(PrecondConfig::defaults(DualVariant::cpl).s, 0.5);
  EXPECT_DOUBLE_EQ(PrecondConfig::defaults(DualVariant::pwc).beta2, 0.065);
  EXPECT_NO_THROW(PrecondConfig::defaults(DualVariant::pwc).validate());
}

TEST(PrecondConfig, Validation) {
  PrecondConfig c;
  c.beta1 = -1.0;
  EXPECT_THROW(c.validate(), Error);
  c = PrecondConfig{};
  c.s = 1.5;
  EXPECT_THROW(c.validate(), Error);
  c = PrecondConfig{};
  c.ell = 4;
  try {
    c.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported_degree);
  }
}

TEST(PwcPreconditioner, ZeroCouplingGivesDiagonal) {
  std::mt19937_64 rng(1);
  const Eigen::VectorXd D = random_positive(rng, 6), bubble = random_positive(rng, 6);
  const SparseMatrix p = random_incidence(rng, 9, 6);
  const LinearOperator G = make_pwc_preconditioner(D, p, LinearOperator::from_dense(Eigen::MatrixXd::Zero(9, 9)), bubble);
  const Eigen::MatrixXd expected = (bubble.array() / D.array().square()).matrix().asDiagonal();
  EXPECT_LT(rel(G.dense(), expected), 1e-15);
}

TEST(PwcPreconditioner, ScalarCase) {
  Eigen::VectorXd D(1), bubble(1);
  D << 0.5;
  bubble << 0.2;
  SparseMatrix p(1, 1);
  p.insert(0, 0) = 1.0;
  Eigen::MatrixXd B(1, 1);
  B << 3.0;
  const LinearOperator G = make_pwc_preconditioner(D, p, LinearOperator::from_dense(B), bubble);
  EXPECT_NEAR(G.dense()(0, 0), (3.0 + 0.2) / 0.25, 1e-14);
}

TEST(PwcPreconditioner, MatchesDenseComposition) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 4; ++trial) {
    const int cells = 30 + 10 * trial, verts = 12 + 5 * trial;
    const Eigen::VectorXd D = random_positive(rng, verts), bubble = random_positive(rng, verts);
    const SparseMatrix p = random_incidence(rng, cells, verts);
    const Eigen::MatrixXd B = random_spd(rng, cells);
    const Eigen::MatrixXd Dinv = D.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd pd(p);
    const Eigen::MatrixXd expected = Dinv * (pd.transpose() * B * pd + Eigen::MatrixXd(bubble.asDiagonal())) * Dinv;
    const DenseOperator Bop = make_dense_operator(B, SpaceKind::pwc0, std::vector<int>(static_cast<std::size_t>(cells), 0));
    EXPECT_LT(rel(make_pwc_preconditioner(D, p, Bop, bubble).dense(), expected), 1e-12);
    EXPECT_LT(rel(make_pwc_preconditioner(D, p, LinearOperator::from_dense(B), bubble).dense(), expected), 1e-12);
  }
}

TEST(PwcPreconditioner, LinearSymmetricPositive) {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd D = random_positive(rng, 10), bubble = random_positive(rng, 10);
  const SparseMatrix p = random_incidence(rng, 20, 10);
  const LinearOperator G = make_pwc_preconditioner(D, p, LinearOperator::from_dense(random_spd(rng, 20)), bubble);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(10), y = Eigen::VectorXd::Random(10);
  EXPECT_LT((G.apply(Eigen::VectorXd(2.0 * x - 3.0 * y)) - (2.0 * G.apply(x) - 3.0 * G.apply(y))).norm(), 1e-12 * G.apply(x).norm());
  const Eigen::MatrixXd dense = G.dense();
  EXPECT_LT((dense - dense.transpose()).norm(), 1e-14 * dense.norm());
  EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(dense).info(), Eigen::Success);
  // Block application agrees with column-wise application.
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 3);
  const Eigen::MatrixXd Y = G.apply(X);
  for (int c = 0; c < 3; ++c) EXPECT_LT((Y.col(c) - G.apply(Eigen::VectorXd(X.col(c)))).norm(), 1e-13 * Y.norm());
}

TEST(PwcPreconditioner, ShapeErrors) {
  const Eigen::VectorXd D = Eigen::VectorXd::Ones(3);
  SparseMatrix p(4, 3);
  const LinearOperator B4 = LinearOperator::identity(4), B5 = LinearOperator::identity(5);
  EXPECT_NO_THROW(make_pwc_preconditioner(D, p, B4, D));
  try {
    make_pwc_preconditioner(D, p, B5, D);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape_mismatch);
  }
  EXPECT_THROW(make_pwc_preconditioner(D, p, B4, Eigen::VectorXd::Ones(2)), Error);
  EXPECT_THROW(make_pwc_preconditioner(Eigen::VectorXd::Ones(2), p, B4, Eigen::VectorXd::Ones(2)), Error);
}

TEST(CplPreconditioner, IdentityCoupling) {
  const double beta = 0.34;
  const LinearOperator G = make_cpl_preconditioner(Eigen::VectorXd::Ones(5), LinearOperator::identity(5),
                                                   Eigen::VectorXd::Constant(5, beta));
  EXPECT_LT(rel(G.dense(), (1.0 + beta) * Eigen::MatrixXd::Identity(5, 5)), 1e-15);
}

TEST(CplPreconditioner, MatchesDenseComposition) {
  std::mt19937_64 rng(4);
  const Eigen::VectorXd D = random_positive(rng, 25), bubble = random_positive(rng, 25);
  const Eigen::MatrixXd B = random_spd(rng, 25);
  const Eigen::MatrixXd Dinv = D.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd expected = Dinv * (B + Eigen::MatrixXd(bubble.asDiagonal())) * Dinv;
  EXPECT_LT(rel(make_cpl_preconditioner(D, LinearOperator::from_dense(B), bubble).dense(), expected), 1e-12);
}

TEST(CplPreconditioner, ShapeErrors) {
  EXPECT_THROW(make_cpl_preconditioner(Eigen::VectorXd::Ones(3), LinearOperator::identity(4), Eigen::VectorXd::Ones(3)),
               Error);
  EXPECT_THROW(make_cpl_preconditioner(Eigen::VectorXd::Ones(3), LinearOperator::identity(3), Eigen::VectorXd::Ones(2)),
               Error);
  EXPECT_THROW(make_cpl_preconditioner(Eigen::VectorXd::Zero(3), LinearOperator::identity(3), Eigen::VectorXd::Ones(3)),
               Error);
}

TEST(HigherOrderPreconditioner, IdentityInclusion) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd G1 = random_spd(rng, 6);
  const Eigen::VectorXd G2 = random_positive(rng, 6);
  SparseMatrix q(6, 6);
  q.setIdentity();
  const LinearOperator G = make_higher_order_preconditioner(q, LinearOperator::from_dense(G1), G2);
  EXPECT_LT(rel(G.dense(), G1 + Eigen::MatrixXd(G2.asDiagonal())), 1e-15);
}

TEST(HigherOrderPreconditioner, MatchesDenseComposition) {
  const SimplicialMesh m = build_cube_surface_mesh();
  const LagrangeSpace space(m, 3);
  const SparseMatrix q = linear_embedding(space);
  std::mt19937_64 rng(6);
  const Eigen::MatrixXd G1 = random_spd(rng, 8);
  const Eigen::VectorXd G2 = lagrange_node_diagonal(space, 0.5, 0.065);
  const Eigen::MatrixXd qd(q);
  const Eigen::MatrixXd expected = qd * G1 * qd.transpose() + Eigen::MatrixXd(G2.asDiagonal());
  EXPECT_LT(rel(make_higher_order_preconditioner(q, LinearOperator::from_dense(G1), G2).dense(), expected), 1e-12);
  EXPECT_THROW(make_higher_order_preconditioner(q, LinearOperator::identity(7), G2), Error);
  EXPECT_THROW(make_higher_order_preconditioner(q, LinearOperator::identity(8), Eigen::VectorXd::Ones(5)), Error);
}

TEST(JacobiPreconditioner, InverseDiagonal) {
  Eigen::VectorXd d(3);
  d << 2.0, 4.0, 0.5;
  const Eigen::VectorXd x = make_jacobi_preconditioner(d).apply(Eigen::VectorXd(Eigen::VectorXd::Ones(3)));
  EXPECT_DOUBLE_EQ(x[0], 0.5);
  EXPECT_DOUBLE_EQ(x[1], 0.25);
  EXPECT_DOUBLE_EQ(x[2], 2.0);
  d[1] = 0.0;
  EXPECT_THROW(make_jacobi_preconditioner(d), Error);
}

TEST(PwcPreconditioner, CongruenceInvariantSpectrum) {
  // kappa(G A) is invariant under A -> S A S, G -> S^{-1} G S^{-1} for diagonal S.
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd A = random_spd(rng, 15), Gm = random_spd(rng, 15);
  const Eigen::VectorXd s = random_positive(rng, 15);
  const Eigen::MatrixXd S = s.asDiagonal(), Sinv = s.cwiseInverse().asDiagonal();
  const Eigen::VectorXd e1 = dense_eig_oracle(Gm, A);
  const Eigen::VectorXd e2 = dense_eig_oracle(Sinv * Gm * Sinv, S * A * S);
  EXPECT_LT((e1 - e2).norm(), 1e-10 * e1.norm());
}

TEST(PwcPreconditioner, IntervalScalingInvariance) {
  // Stretching the interval by lambda scales D by lambda and the Green's matrix by lambda^3; the bubble
  // exponent 1 + 2s/d keeps G A unchanged.
  const SimplicialMesh m = build_interval_mesh(8, GammaSpec::both);
  const Eigen::MatrixXd K = assemble_stiffness(m, 1).values();
  const Eigen::MatrixXd B = assemble_greens_1d(m).values();
  const SparseMatrix p = patch_incidence(m);
  const Eigen::VectorXd D = coupling_diagonal(m, DualVariant::pwc);
  const double lambda = 0.3;
  const Eigen::MatrixXd G1 = make_pwc_preconditioner(D, p, LinearOperator::from_dense(B), bubble_diagonal(D, 1, 1.0, 0.65)).dense();
  const Eigen::VectorXd Ds = lambda * D;
  const Eigen::MatrixXd G2 = make_pwc_preconditioner(Ds, p, LinearOperator::from_dense(std::pow(lambda, 3.0) * B),
                                                     bubble_diagonal(Ds, 1, 1.0, 0.65)).dense();
  const Eigen::VectorXd e1 = dense_eig_oracle(G1, K);
  const Eigen::VectorXd e2 = dense_eig_oracle(G2, K / lambda);
  EXPECT_NEAR(e1.maxCoeff() / e1.minCoeff(), e2.maxCoeff() / e2.minCoeff(), 1e-10 * e1.maxCoeff() / e1.minCoeff());
}
