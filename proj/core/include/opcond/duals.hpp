#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <utility>
#include <vector>

#include "opcond/lagrange.hpp"
#include "opcond/mesh.hpp"

namespace opcond {

/// Piecewise-constant (order -1,0) or continuous piecewise-linear (order 0,1) dual construction.
enum class DualVariant { pwc, cpl };

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Coupling diagonal over the free vertices: |omega_v| (pwc) or |omega_v|/(d+1) (cpl).
/// @throws Error(invalid_mesh) when every vertex is on the Dirichlet part.
Eigen::VectorXd coupling_diagonal(const SimplicialMesh& mesh, DualVariant variant);

/// 0/1 matrix with rows indexed by cells and columns by free vertices.
SparseMatrix patch_incidence(const SimplicialMesh& mesh);

/// beta1 * D^{1 + 2s/d}, entrywise.
/// @throws Error(invalid_argument) for beta1 <= 0 or s outside [0, 1].
Eigen::VectorXd bubble_diagonal(const Eigen::VectorXd& coupling, int dim, double s, double beta1);
Eigen::VectorXd bubble_diagonal(const SimplicialMesh& mesh, DualVariant variant, double s, double beta1);

/// Inclusion of the free linear hats into the degree-ell space: entry (node, v) is the
/// hat of v evaluated at the node.
SparseMatrix linear_embedding(const LagrangeSpace& space);

/// beta2 / sum_T h_T^{-2s} ||phi_node||^2_{L2(T)} per free node.
/// @throws Error(invalid_argument) for beta2 <= 0.
Eigen::VectorXd lagrange_node_diagonal(const LagrangeSpace& space, double s, double beta2);

/// Coefficients of a piecewise-constant function on a refined mesh: (fine cell, value).
using PiecewiseConstant = std::vector<std::pair<int, double>>;

/// Dual functions materialized on red refinements; only used to check the construction.
struct DualOracle {
  DualVariant variant = DualVariant::pwc;
  std::vector<int> free_vertices;
  Eigen::VectorXd coupling;
  /// One-fold refinement (always present).
  RedRefinement once;
  /// Two-fold refinement with genealogy to the coarse mesh (d = 1 pwc and cpl).
  RedRefinement twice;
  /// pwc: psi on `once` (d >= 2) or on `twice` (d = 1). cpl: unused.
  std::vector<PiecewiseConstant> psi;
  /// pwc: psi minus the patch indicator, same mesh as psi. cpl: bubble on `twice`.
  std::vector<PiecewiseConstant> theta;
  /// cpl only: the functions phi~ on `once`, indexed by vertex id (all vertices).
  std::vector<PiecewiseConstant> phi_tilde;
  /// Refinement that carries psi and theta.
  const RedRefinement& psi_mesh() const { return psi_on_twice ? twice : once; }
  bool psi_on_twice = false;
};

/// @param refinement_depth 0 selects the default (1 for d >= 2, 2 for d = 1).
/// @throws Error(unsupported_configuration) for the single-refinement formula in d = 1.
DualOracle dual_oracle_pwc(const SimplicialMesh& mesh, int refinement_depth = 0);
DualOracle dual_oracle_cpl(const SimplicialMesh& mesh);

/// Integral of a piecewise-constant refined function against the coarse hat of `vertex`,
/// evaluated exactly as |child| times the hat at the child centroid.
double pair_with_hat(const RedRefinement& refinement, const PiecewiseConstant& f, const SimplicialMesh& coarse,
                     int vertex);

/// L2 product of two refined piecewise-constant functions, optionally restricted to one coarse cell.
double l2_product(const RedRefinement& refinement, const PiecewiseConstant& f, const PiecewiseConstant& g,
                  int coarse_cell = -1);

/// Exact L2 product of the linear hats of vertices v and w.
double hat_product(const SimplicialMesh& mesh, int v, int w);

}  // namespace opcond
