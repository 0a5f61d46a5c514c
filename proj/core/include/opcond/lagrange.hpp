#pragma once

#include <array>
#include <vector>

#include "opcond/mesh.hpp"

namespace opcond {

/// Multi-index of an equispaced lattice point in barycentric coordinates (sums to the degree).
using LatticeIndex = std::array<int, 3>;

/// Canonical lattice of a simplex of dimension dim and polynomial degree ell:
/// vertices first, then edge points, then interior points.
std::vector<LatticeIndex> reference_lattice(int dim, int ell);

/// Values of the Lagrange basis at barycentric point lambda, one entry per lattice index.
void lagrange_values(int dim, int ell, const std::vector<LatticeIndex>& lattice, const double* lambda,
                     double* values);

/// Derivatives of the Lagrange basis with respect to the barycentric coordinates
/// (row-major, (dim+1) entries per basis function).
void lagrange_barycentric_gradients(int dim, int ell, const std::vector<LatticeIndex>& lattice,
                                    const double* lambda, double* grads);

/// Continuous degree-ell Lagrange space on a mesh with Dirichlet nodes removed.
class LagrangeSpace {
 public:
  /// @throws Error(unsupported_degree) unless 1 <= ell <= 3.
  LagrangeSpace(const SimplicialMesh& mesh, int ell);

  const SimplicialMesh& mesh() const noexcept { return *mesh_; }
  int degree() const noexcept { return ell_; }
  int nodes_per_cell() const noexcept { return static_cast<int>(lattice_.size()); }
  const std::vector<LatticeIndex>& lattice() const noexcept { return lattice_; }

  std::size_t num_nodes() const noexcept { return node_point_.size(); }
  std::size_t num_free() const noexcept { return free_nodes_.size(); }

  /// Global node ids of cell e in lattice order.
  const std::vector<int>& cell_nodes(int e) const { return cell_nodes_[static_cast<std::size_t>(e)]; }
  const Point& node_point(int node) const { return node_point_[static_cast<std::size_t>(node)]; }
  bool node_on_gamma(int node) const { return node_on_gamma_[static_cast<std::size_t>(node)] != 0; }
  /// Node id to free-dof index, -1 for Dirichlet nodes.
  int free_index(int node) const { return free_index_[static_cast<std::size_t>(node)]; }
  const std::vector<int>& free_nodes() const noexcept { return free_nodes_; }

  /// Mesh vertex at which a node sits, -1 for edge and interior nodes.
  int node_vertex(int node) const { return node < static_cast<int>(mesh_->num_vertices()) ? node : -1; }

 private:
  const SimplicialMesh* mesh_;
  int ell_;
  std::vector<LatticeIndex> lattice_;
  std::vector<std::vector<int>> cell_nodes_;
  std::vector<Point> node_point_;
  std::vector<char> node_on_gamma_;
  std::vector<int> free_index_;
  std::vector<int> free_nodes_;
};

}  // namespace opcond
