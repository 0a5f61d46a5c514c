#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "opcond/lagrange.hpp"
#include "opcond/mesh.hpp"

namespace opcond {

/// Discrete spaces the Galerkin matrices live on.
enum class SpaceKind {
  pwc0,     ///< piecewise constants, one dof per cell
  cpl1,     ///< continuous piecewise linears on the free vertices
  lagrange  ///< continuous degree-ell Lagrange functions on the free nodes
};

/// Dense Galerkin matrix with dof labels. The matrix is shared, so copies are cheap.
struct DenseOperator {
  std::shared_ptr<const Eigen::MatrixXd> matrix;
  SpaceKind space = SpaceKind::pwc0;
  /// Cell ids (pwc0), vertex ids (cpl1) or node ids (lagrange) per row.
  std::vector<int> labels;
  bool symmetric = true;

  Eigen::Index dim() const { return matrix ? matrix->rows() : 0; }
  const Eigen::MatrixXd& values() const { return *matrix; }
};

DenseOperator make_dense_operator(Eigen::MatrixXd values, SpaceKind space, std::vector<int> labels,
                                  bool symmetric = true);

/// Panel-pair quadrature parameters for the surface single layer.
struct QuadratureSettings {
  /// Gauss points in the polynomial directions of the regularized rules of touching pairs;
  /// the directions carrying the distance factor use twice as many.
  int singular_order = 5;
  /// Disjoint pairs whose centroid distance is below this multiple of the summed panel radii
  /// are split (larger panel first) until they separate.
  double subdivide_below = 1.5;
  /// (minimum separation ratio, Gauss points per direction), ascending in the ratio.
  std::vector<std::pair<double, int>> far_orders = {{1.5, 5}, {3.0, 4}, {6.0, 3}, {12.0, 2}};
  int max_subdivision_depth = 30;

  static QuadratureSettings standard();
  /// Higher orders everywhere, used for self-convergence checks.
  static QuadratureSettings high();
};

/// Stiffness matrix of the degree-ell space over its free nodes (exact quadrature).
DenseOperator assemble_stiffness(const SimplicialMesh& mesh, int ell);

/// Mass matrix of the degree-ell space over its free nodes (exact quadrature).
DenseOperator assemble_mass(const SimplicialMesh& mesh, int ell);

/// Integrals of the degree-ell basis functions over the free nodes.
Eigen::VectorXd basis_integrals(const LagrangeSpace& space);

/// Single layer on an interval mesh with kernel -(1/2pi) ln(|x - y| / L).
/// Touching and nearby cell pairs use exact log-moment formulas; separated pairs use Gauss rules
/// with enough points for double precision.
/// @param scale L; 0 selects 2 diam.
/// @throws Error(coercivity_risk) if L <= diam.
DenseOperator assemble_single_layer_1d(const SimplicialMesh& mesh, SpaceKind space, double scale = 0.0);

/// Hypersingular operator on an interval screen, as the single layer applied to derivatives.
/// @throws Error(unsupported_configuration) unless both endpoints are Dirichlet.
DenseOperator assemble_hypersingular_1d(const SimplicialMesh& mesh, double scale = 0.0);

/// Per-cell derivative map from the free hats to piecewise constants (entries +-1/h).
Eigen::SparseMatrix<double> interval_derivative(const SimplicialMesh& mesh);

/// Galerkin matrix of the kernel min(x, y) - x y on (0, 1), exact.
/// @throws Error(rescale_required) if the mesh does not cover exactly (0, 1).
DenseOperator assemble_greens_1d(const SimplicialMesh& mesh, SpaceKind space = SpaceKind::pwc0);

/// Hypersingular operator A = A~ + alpha m m^T on a closed surface; the rank-one part is kept apart.
struct HypersingularOperator {
  DenseOperator tilde;
  /// Basis function integrals m over the free dofs.
  Eigen::VectorXd moments;
  double alpha = 0.0;

  Eigen::Index dim() const { return tilde.dim(); }
  Eigen::MatrixXd dense() const;
  Eigen::VectorXd diagonal() const;
};

/// Which surface operators one panel-pair sweep should produce.
struct SurfaceRequest {
  bool single_layer_pwc = false;
  bool single_layer_cpl = false;
  bool hypersingular = false;
  int hypersingular_degree = 1;
  double alpha = 0.05;
};

struct SurfaceOperators {
  std::optional<DenseOperator> single_layer_pwc;
  std::optional<DenseOperator> single_layer_cpl;
  std::optional<HypersingularOperator> hypersingular;
};

/// Assembles the requested operators from one sweep over panel pairs with kernel 1/(4 pi r).
/// The hypersingular operator uses the surface-curl reduction.
/// @throws Error(invalid_mesh) for non-surface meshes, Error(unsupported_configuration) for open
///         surfaces when the hypersingular operator is requested, Error(invalid_argument) for alpha < 0.
SurfaceOperators assemble_surface_operators(const SimplicialMesh& mesh, const SurfaceRequest& request,
                                            const QuadratureSettings& settings = QuadratureSettings::standard());

DenseOperator assemble_single_layer_3d(const SimplicialMesh& mesh, SpaceKind space,
                                       const QuadratureSettings& settings = QuadratureSettings::standard());

HypersingularOperator assemble_hypersingular_3d(const SimplicialMesh& mesh, double alpha, int ell = 1,
                                                const QuadratureSettings& settings = QuadratureSettings::standard());

}  // namespace opcond
