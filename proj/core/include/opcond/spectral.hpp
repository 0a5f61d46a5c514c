#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "opcond/linear_operator.hpp"

namespace opcond {

struct LanczosOptions {
  /// Relative change of both extreme Ritz values below which the run counts as converged.
  double tol = 1e-6;
  /// 0 allows the full Krylov dimension.
  int max_iter = 0;
  std::uint64_t seed = 42;
  /// Number of consecutive iterations that must satisfy the tolerance.
  int stable_iterations = 2;
  int max_restarts = 3;
};

struct SpectralReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;
  /// Last relative changes of the extreme Ritz values.
  double change_min = 0.0;
  double change_max = 0.0;
  /// Extreme Ritz values after every iteration.
  std::vector<double> history_min;
  std::vector<double> history_max;
};

/// Extreme eigenvalues of G A by Lanczos in the A inner product with full reorthogonalization.
/// One application of A and one of G per iteration.
/// @throws Error(shape_mismatch) for different dimensions, Error(breakdown) after too many restarts
///         with moving extremes, Error(indefinite) on a non-positive Ritz value.
SpectralReport lanczos_condition(const LinearOperator& G, const LinearOperator& A, const LanczosOptions& options = {});

struct PcgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
  /// ||r_k|| / ||b|| for k = 0, 1, ...
  std::vector<double> residual_history;
};

/// Preconditioned CG with z = G r; stops once ||r|| / ||b|| <= tol.
PcgResult pcg_solve(const LinearOperator& A, const LinearOperator& G, const Eigen::VectorXd& b, double tol,
                    int max_iter);

/// All eigenvalues of G A, ascending, via the Cholesky factor of A.
/// @throws Error(factorization) if A is not positive definite.
Eigen::VectorXd dense_eig_oracle(const Eigen::MatrixXd& G, const Eigen::MatrixXd& A);

}  // namespace opcond
