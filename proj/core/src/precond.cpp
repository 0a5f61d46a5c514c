#include "opcond/precond.hpp"

#include <string>

#include "opcond/error.hpp"

namespace opcond {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::shape_mismatch, what);
}

Eigen::VectorXd inverted(const Eigen::VectorXd& D) {
  if (!(D.array() > 0.0).all()) throw Error(ErrorCode::invalid_argument, "coupling diagonal must be positive");
  return D.cwiseInverse();
}

}  // namespace

PrecondConfig PrecondConfig::defaults(DualVariant variant) {
  PrecondConfig c;
  c.variant = variant;
  c.beta1 = variant == DualVariant::pwc ? 0.65 : 0.34;
  return c;
}

void PrecondConfig::validate() const {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::invalid_argument, "s must lie in [0, 1]");
  if (!(beta1 > 0.0)) throw Error(ErrorCode::invalid_argument, "beta1 must be positive");
  if (!(beta2 > 0.0)) throw Error(ErrorCode::invalid_argument, "beta2 must be positive");
  if (ell < 1 || ell > 3) throw Error(ErrorCode::unsupported_degree, "ell must be 1, 2 or 3");
}

LinearOperator make_pwc_preconditioner(const Eigen::VectorXd& D, const SparseMatrix& p, const LinearOperator& B_U,
                                       const Eigen::VectorXd& bubble) {
  require(p.rows() == B_U.dim(), "incidence rows (" + std::to_string(p.rows()) + ") differ from dim(B_U) (" +
                                     std::to_string(B_U.dim()) + ")");
  require(p.cols() == D.size(), "incidence columns differ from dim(D)");
  require(bubble.size() == D.size(), "bubble diagonal differs from dim(D)");
  const Eigen::VectorXd Dinv = inverted(D);
  auto pp = std::make_shared<const SparseMatrix>(p);
  return LinearOperator(
      D.size(),
      [Dinv, pp, B_U, bubble](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
        const Eigen::MatrixXd xs = Dinv.asDiagonal() * x;
        const Eigen::MatrixXd px = *pp * xs;
        Eigen::MatrixXd y = pp->transpose() * B_U.apply(px);
        y.noalias() += bubble.asDiagonal() * xs;
        return Dinv.asDiagonal() * y;
      },
      B_U.symmetric(), B_U.symmetric() && B_U.positive_definite());
}

LinearOperator make_pwc_preconditioner(const Eigen::VectorXd& D, const SparseMatrix& p, const DenseOperator& B_U,
                                       const Eigen::VectorXd& bubble) {
  return make_pwc_preconditioner(D, p, LinearOperator::from_dense(B_U.matrix, B_U.symmetric, B_U.symmetric), bubble);
}

LinearOperator make_cpl_preconditioner(const Eigen::VectorXd& D, const LinearOperator& B_U,
                                       const Eigen::VectorXd& bubble) {
  require(B_U.dim() == D.size(), "dim(B_U) (" + std::to_string(B_U.dim()) + ") differs from dim(D) (" +
                                     std::to_string(D.size()) + ")");
  require(bubble.size() == D.size(), "bubble diagonal differs from dim(D)");
  const Eigen::VectorXd Dinv = inverted(D);
  return LinearOperator(
      D.size(),
      [Dinv, B_U, bubble](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
        const Eigen::MatrixXd xs = Dinv.asDiagonal() * x;
        Eigen::MatrixXd y = B_U.apply(xs);
        y.noalias() += bubble.asDiagonal() * xs;
        return Dinv.asDiagonal() * y;
      },
      B_U.symmetric(), B_U.symmetric() && B_U.positive_definite());
}

LinearOperator make_cpl_preconditioner(const Eigen::VectorXd& D, const DenseOperator& B_U,
                                       const Eigen::VectorXd& bubble) {
  return make_cpl_preconditioner(D, LinearOperator::from_dense(B_U.matrix, B_U.symmetric, B_U.symmetric), bubble);
}

LinearOperator make_higher_order_preconditioner(const SparseMatrix& q, const LinearOperator& G1,
                                                const Eigen::VectorXd& G2) {
  require(q.cols() == G1.dim(), "embedding columns differ from dim(G1)");
  require(q.rows() == G2.size(), "embedding rows differ from dim(G2)");
  auto qq = std::make_shared<const SparseMatrix>(q);
  const bool pd = G1.positive_definite() && (G2.array() > 0.0).all();
  return LinearOperator(
      G2.size(),
      [qq, G1, G2](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
        const Eigen::MatrixXd qx = qq->transpose() * x;
        Eigen::MatrixXd y = *qq * G1.apply(qx);
        y.noalias() += G2.asDiagonal() * x;
        return y;
      },
      G1.symmetric(), pd);
}

LinearOperator make_jacobi_preconditioner(const Eigen::VectorXd& diagonal) {
  if (!(diagonal.array() > 0.0).all()) throw Error(ErrorCode::invalid_argument, "Jacobi needs a positive diagonal");
  return LinearOperator::diagonal(diagonal.cwiseInverse());
}

}  // namespace opcond
