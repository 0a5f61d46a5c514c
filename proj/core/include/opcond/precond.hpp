#pragma once

#include <Eigen/Dense>

#include "opcond/assembly.hpp"
#include "opcond/duals.hpp"
#include "opcond/linear_operator.hpp"

namespace opcond {

/// Parameters of the opposite-order preconditioner.
struct PrecondConfig {
  DualVariant variant = DualVariant::pwc;
  double s = 0.5;
  double beta1 = 0.65;
  /// Only used for ell > 1.
  double beta2 = 0.065;
  int ell = 1;

  /// beta1 = 0.65 for pwc and 0.34 for cpl, other fields at their defaults.
  static PrecondConfig defaults(DualVariant variant);
  /// @throws Error(invalid_argument) or Error(unsupported_degree) for out-of-range fields.
  void validate() const;
};

/// x -> D^{-1} (p^T B_U p + diag(bubble)) D^{-1} x, never formed densely.
/// @throws Error(shape_mismatch) unless rows(p) = dim(B_U) and cols(p) = dim(D) = dim(bubble).
LinearOperator make_pwc_preconditioner(const Eigen::VectorXd& D, const SparseMatrix& p, const LinearOperator& B_U,
                                       const Eigen::VectorXd& bubble);
LinearOperator make_pwc_preconditioner(const Eigen::VectorXd& D, const SparseMatrix& p, const DenseOperator& B_U,
                                       const Eigen::VectorXd& bubble);

/// x -> D^{-1} (B_U + diag(bubble)) D^{-1} x.
/// @throws Error(shape_mismatch) unless dim(B_U) = dim(D) = dim(bubble).
LinearOperator make_cpl_preconditioner(const Eigen::VectorXd& D, const LinearOperator& B_U,
                                       const Eigen::VectorXd& bubble);
LinearOperator make_cpl_preconditioner(const Eigen::VectorXd& D, const DenseOperator& B_U,
                                       const Eigen::VectorXd& bubble);

/// x -> q G1 (q^T x) + diag(G2) x.
/// @throws Error(shape_mismatch) unless cols(q) = dim(G1) and rows(q) = dim(G2).
LinearOperator make_higher_order_preconditioner(const SparseMatrix& q, const LinearOperator& G1,
                                                const Eigen::VectorXd& G2);

/// diag(A)^{-1}.
/// @throws Error(invalid_argument) if a diagonal entry is not positive.
LinearOperator make_jacobi_preconditioner(const Eigen::VectorXd& diagonal);

}  // namespace opcond
