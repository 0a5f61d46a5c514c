#include "opcond/linear_operator.hpp"

#include <string>

#include "opcond/error.hpp"

namespace opcond {

LinearOperator::LinearOperator(Eigen::Index dim, BlockApply apply, bool symmetric, bool positive_definite)
    : dim_(dim), apply_(std::move(apply)), symmetric_(symmetric), positive_definite_(positive_definite) {
  if (dim < 0) throw Error(ErrorCode::invalid_argument, "negative operator dimension");
}

LinearOperator LinearOperator::identity(Eigen::Index dim) {
  return LinearOperator(dim, [](const Eigen::MatrixXd& x) { return x; }, true, true);
}

LinearOperator LinearOperator::from_dense(std::shared_ptr<const Eigen::MatrixXd> matrix, bool symmetric,
                                          bool positive_definite) {
  if (matrix->rows() != matrix->cols()) throw Error(ErrorCode::shape_mismatch, "operator matrix must be square");
  const Eigen::Index n = matrix->rows();
  return LinearOperator(
      n, [m = std::move(matrix)](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return *m * x; }, symmetric,
      positive_definite);
}

LinearOperator LinearOperator::from_dense(Eigen::MatrixXd matrix, bool symmetric, bool positive_definite) {
  return from_dense(std::make_shared<const Eigen::MatrixXd>(std::move(matrix)), symmetric, positive_definite);
}

LinearOperator LinearOperator::from_sparse(Eigen::SparseMatrix<double> matrix, bool symmetric, bool positive_definite) {
  if (matrix.rows() != matrix.cols()) throw Error(ErrorCode::shape_mismatch, "operator matrix must be square");
  const Eigen::Index n = matrix.rows();
  auto m = std::make_shared<const Eigen::SparseMatrix<double>>(std::move(matrix));
  return LinearOperator(
      n, [m](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return *m * x; }, symmetric, positive_definite);
}

LinearOperator LinearOperator::diagonal(Eigen::VectorXd entries) {
  const Eigen::Index n = entries.size();
  const bool pd = (entries.array() > 0.0).all();
  return LinearOperator(
      n, [d = std::move(entries)](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return d.asDiagonal() * x; }, true,
      pd);
}

LinearOperator LinearOperator::rank_one_update(std::shared_ptr<const Eigen::MatrixXd> matrix, Eigen::VectorXd m,
                                               double alpha) {
  if (matrix->rows() != matrix->cols() || matrix->rows() != m.size())
    throw Error(ErrorCode::shape_mismatch, "rank-one update has inconsistent sizes");
  const Eigen::Index n = m.size();
  return LinearOperator(
      n,
      [a = std::move(matrix), m = std::move(m), alpha](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
        Eigen::MatrixXd y = *a * x;
        y.noalias() += (alpha * m) * (m.transpose() * x);
        return y;
      },
      true, alpha > 0.0);
}

Eigen::VectorXd LinearOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw Error(ErrorCode::shape_mismatch,
                "operator of dimension " + std::to_string(dim_) + " applied to vector of length " + std::to_string(x.size()));
  return apply_(x);
}

Eigen::MatrixXd LinearOperator::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != dim_)
    throw Error(ErrorCode::shape_mismatch,
                "operator of dimension " + std::to_string(dim_) + " applied to block with " + std::to_string(x.rows()) + " rows");
  return apply_(x);
}

Eigen::MatrixXd LinearOperator::dense() const { return apply(Eigen::MatrixXd(Eigen::MatrixXd::Identity(dim_, dim_))); }

}  // namespace opcond
