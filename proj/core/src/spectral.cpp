#include "opcond/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "opcond/error.hpp"

namespace opcond {

namespace {

double relative_change(double now, double before) {
  return std::abs(now - before) / std::max(std::abs(now), std::numeric_limits<double>::min());
}

/// Random start vector A-orthogonalized against the basis; returns its A-norm (0 if exhausted).
double fresh_vector(const LinearOperator& A, const Eigen::MatrixXd& V, const Eigen::MatrixXd& U, int k,
                    std::mt19937_64& rng, Eigen::VectorXd& v, Eigen::VectorXd& u) {
  std::normal_distribution<double> normal;
  v.resize(A.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  const double start = v.norm();
  for (int pass = 0; pass < 2 && k > 0; ++pass) v -= V.leftCols(k) * (U.leftCols(k).transpose() * v);
  if (v.norm() <= 1e-10 * start) return 0.0;
  u = A.apply(v);
  const double norm2 = v.dot(u);
  if (!(norm2 > 0.0)) throw Error(ErrorCode::indefinite, "A is not positive definite");
  const double norm = std::sqrt(norm2);
  v /= norm;
  u /= norm;
  return norm;
}

}  // namespace

SpectralReport lanczos_condition(const LinearOperator& G, const LinearOperator& A, const LanczosOptions& options) {
  if (G.dim() != A.dim()) throw Error(ErrorCode::shape_mismatch, "G and A differ in dimension");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  const Eigen::Index n = A.dim();
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty operators");
  const int max_iter = static_cast<int>(options.max_iter > 0 ? std::min<Eigen::Index>(options.max_iter, n) : n);

  std::mt19937_64 rng(options.seed);
  Eigen::MatrixXd V(n, max_iter), U(n, max_iter);  // U = A V
  std::vector<double> alpha, beta;                 // beta[j] couples j and j+1
  Eigen::VectorXd v, u;
  if (fresh_vector(A, V, U, 0, rng, v, u) == 0.0) throw Error(ErrorCode::breakdown, "zero start vector");
  V.col(0) = v;
  U.col(0) = u;

  SpectralReport report;
  int stable = 0;
  int k = 0;
  while (true) {
    const Eigen::VectorXd g = G.apply(Eigen::VectorXd(U.col(k)));
    const double a = U.col(k).dot(g);
    alpha.push_back(a);
    ++k;

    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd off = Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    const double lmin = tri.eigenvalues()[0], lmax = tri.eigenvalues()[k - 1];
    if (!(lmin > 0.0))
      throw Error(ErrorCode::indefinite, "non-positive Ritz value " + std::to_string(lmin) + " at iteration " + std::to_string(k));
    if (k > 1) {
      report.change_min = relative_change(lmin, report.lambda_min);
      report.change_max = relative_change(lmax, report.lambda_max);
      stable = report.change_min < options.tol && report.change_max < options.tol ? stable + 1 : 0;
    }
    report.lambda_min = lmin;
    report.lambda_max = lmax;
    report.history_min.push_back(lmin);
    report.history_max.push_back(lmax);
    report.iterations = k;
    if (k == n) {
      report.converged = true;
      break;
    }
    if (stable >= options.stable_iterations) {
      report.converged = true;
      break;
    }
    if (k >= max_iter) break;

    // w = G A v_k - alpha v_k - beta v_{k-1}, then full reorthogonalization in the A inner product.
    Eigen::VectorXd w = g - a * V.col(k - 1);
    if (k > 1) w -= beta.back() * V.col(k - 2);
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(k) * (U.leftCols(k).transpose() * w);
    Eigen::VectorXd Aw = A.apply(w);
    const double norm2 = w.dot(Aw);
    const double scale = std::max(std::abs(lmax), 1.0);
    if (norm2 > (1e-14 * scale) * (1e-14 * scale)) {
      const double b = std::sqrt(norm2);
      beta.push_back(b);
      V.col(k) = w / b;
      U.col(k) = Aw / b;
      continue;
    }
    // Invariant subspace found: continue from a fresh vector, decoupled in T.
    if (report.restarts >= options.max_restarts) {
      if (report.change_min < options.tol && report.change_max < options.tol) {
        report.converged = true;
        break;
      }
      throw Error(ErrorCode::breakdown, "Lanczos breakdown after " + std::to_string(report.restarts) + " restarts");
    }
    ++report.restarts;
    if (fresh_vector(A, V, U, k, rng, v, u) == 0.0) {
      report.converged = true;
      break;
    }
    beta.push_back(0.0);
    V.col(k) = v;
    U.col(k) = u;
  }
  report.kappa = report.lambda_max / report.lambda_min;
  return report;
}

PcgResult pcg_solve(const LinearOperator& A, const LinearOperator& G, const Eigen::VectorXd& b, double tol,
                    int max_iter) {
  if (A.dim() != G.dim() || A.dim() != b.size()) throw Error(ErrorCode::shape_mismatch, "PCG operands differ in size");
  PcgResult result;
  result.x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    result.converged = true;
    result.residual_history.push_back(0.0);
    return result;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = G.apply(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  result.residual_history.push_back(1.0);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd Ap = A.apply(p);
    const double step = rz / p.dot(Ap);
    result.x += step * p;
    r -= step * Ap;
    result.iterations = it + 1;
    const double rel = r.norm() / bnorm;
    result.residual_history.push_back(rel);
    if (rel <= tol) {
      result.converged = true;
      break;
    }
    z = G.apply(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return result;
}

Eigen::VectorXd dense_eig_oracle(const Eigen::MatrixXd& G, const Eigen::MatrixXd& A) {
  if (G.rows() != A.rows() || G.cols() != A.cols() || A.rows() != A.cols())
    throw Error(ErrorCode::shape_mismatch, "oracle operands differ in size");
  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::factorization, "A is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd S = L.transpose() * G * L;
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

}  // namespace opcond
