#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <memory>

namespace opcond {

/// Square linear map given by its block application. Copies share the underlying closure.
class LinearOperator {
 public:
  using BlockApply = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

  LinearOperator() = default;
  LinearOperator(Eigen::Index dim, BlockApply apply, bool symmetric = true, bool positive_definite = false);

  static LinearOperator identity(Eigen::Index dim);
  static LinearOperator from_dense(std::shared_ptr<const Eigen::MatrixXd> matrix, bool symmetric = true,
                                   bool positive_definite = false);
  static LinearOperator from_dense(Eigen::MatrixXd matrix, bool symmetric = true, bool positive_definite = false);
  static LinearOperator from_sparse(Eigen::SparseMatrix<double> matrix, bool symmetric = true,
                                    bool positive_definite = false);
  static LinearOperator diagonal(Eigen::VectorXd entries);
  /// dense + alpha m m^T, with the rank-one part applied as two dot products.
  static LinearOperator rank_one_update(std::shared_ptr<const Eigen::MatrixXd> matrix, Eigen::VectorXd m, double alpha);

  Eigen::Index dim() const noexcept { return dim_; }
  bool symmetric() const noexcept { return symmetric_; }
  bool positive_definite() const noexcept { return positive_definite_; }

  /// @throws Error(shape_mismatch) if x has the wrong length.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// Applies the operator to every column.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  /// Materializes the operator by applying it to the identity.
  Eigen::MatrixXd dense() const;

 private:
  Eigen::Index dim_ = 0;
  BlockApply apply_;
  bool symmetric_ = true;
  bool positive_definite_ = false;
};

}  // namespace opcond
