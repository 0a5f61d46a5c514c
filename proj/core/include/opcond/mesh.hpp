#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace opcond {

using Point = std::array<double, 3>;

/// Vertex indices of a simplex; the third slot is -1 for intervals.
///
/// Triangles follow the newest-vertex convention: (v0, v1) is the refinement
/// edge and v2 the newest vertex. The cyclic order also fixes the orientation
/// (normal along (v1 - v0) x (v2 - v0)).
using Cell = std::array<int, 3>;

/// A (d-1)-face as a sorted vertex pair; a vertex face (d = 1) repeats its id.
using Face = std::array<int, 2>;

enum class GammaSpec { none, left, right, both };

/// Conforming simplicial partition of an interval (d = 1) or a flat-panel surface in 3D (d = 2).
///
/// Immutable after construction; refinements return new meshes.
class SimplicialMesh {
 public:
  SimplicialMesh() = default;

  /// @throws Error(invalid_mesh) on bad indices or non-positive volumes.
  SimplicialMesh(int dim, int ambient_dim, std::vector<Point> vertices, std::vector<Cell> cells,
                 std::vector<Face> gamma_faces = {}, std::vector<int> generation = {},
                 std::vector<int> parent = {});

  int dim() const noexcept { return dim_; }
  int ambient_dim() const noexcept { return ambient_dim_; }
  int vertices_per_cell() const noexcept { return dim_ + 1; }
  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_cells() const noexcept { return cells_.size(); }

  const Point& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const Cell& cell(int e) const { return cells_[static_cast<std::size_t>(e)]; }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  std::span<const int> cell_vertices(int e) const {
    return {cells_[static_cast<std::size_t>(e)].data(), static_cast<std::size_t>(dim_ + 1)};
  }

  const std::vector<Face>& gamma_faces() const noexcept { return gamma_faces_; }
  bool on_gamma(int v) const { return gamma_vertex_[static_cast<std::size_t>(v)] != 0; }

  int generation(int e) const { return generation_[static_cast<std::size_t>(e)]; }
  /// Parent cell in the previous mesh of the refinement chain, -1 for initial cells.
  int parent(int e) const { return parent_[static_cast<std::size_t>(e)]; }
  const std::vector<int>& parents() const noexcept { return parent_; }

  /// d-volume |T|.
  double volume(int e) const { return volume_[static_cast<std::size_t>(e)]; }
  /// h_T = |T|^{1/d}.
  double local_size(int e) const;
  double total_volume() const;
  double min_local_size() const;
  /// Diameter of the vertex set (largest vertex distance).
  double diameter() const;

  /// Vertices not on the Dirichlet part, ascending.
  std::vector<int> free_vertices() const;

 private:
  int dim_ = 1;
  int ambient_dim_ = 1;
  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> gamma_faces_;
  std::vector<char> gamma_vertex_;
  std::vector<int> generation_;
  std::vector<int> parent_;
  std::vector<double> volume_;
};

double simplex_volume(const SimplicialMesh& mesh, const Cell& cell);

/// Uniform partition of (a, b) into n elements.
/// @throws Error(invalid_argument) for n = 0 or b <= a.
SimplicialMesh build_interval_mesh(std::size_t n, GammaSpec gamma, double a = 0.0, double b = 1.0);

/// Interval mesh from strictly increasing breakpoints.
SimplicialMesh build_interval_mesh(const std::vector<double>& breakpoints, GammaSpec gamma);

/// Boundary of the unit cube: 12 triangles, 8 vertices, outward orientation,
/// longest edge as refinement edge.
SimplicialMesh build_cube_surface_mesh();

/// Rotates each triangle so that its longest edge is the refinement edge (ties: smallest
/// vertex-id pair). Orientation is preserved.
SimplicialMesh with_longest_edge_marking(const SimplicialMesh& mesh);

/// Copy with every coordinate multiplied by factor.
SimplicialMesh scaled(const SimplicialMesh& mesh, double factor);

/// Copy translated by the given offset.
SimplicialMesh translated(const SimplicialMesh& mesh, const Point& offset);

/// Bisects every element once at its refinement edge.
SimplicialMesh refine_uniform_bisection(const SimplicialMesh& mesh);

/// Newest-vertex bisection of the marked elements plus the closure needed for conformity.
/// @throws Error(invalid_argument) for out-of-range ids.
SimplicialMesh refine_nvb_conforming(const SimplicialMesh& mesh, const std::vector<int>& marked);

/// Elements having a vertex at one of the given points (exact coordinate match).
std::vector<int> cells_touching(const SimplicialMesh& mesh, const std::vector<Point>& points);

/// Uniform red refinement with genealogy, used by the dual-function oracles.
struct RedRefinement {
  SimplicialMesh fine;
  /// Coarse cell of every fine cell.
  std::vector<int> coarse_cell;
  /// Barycentric coordinates of each fine cell's vertices with respect to its coarse cell.
  std::vector<std::array<Point, 3>> barycentric;
  /// For coarse cell T and local vertex k: the fine cell containing that vertex.
  std::vector<std::array<int, 3>> corner_child;
};

/// Applies red refinement `times` times and composes the genealogy back to the input mesh.
/// For times = 2 the corner children are the corner children of the corner children.
RedRefinement red_refine(const SimplicialMesh& mesh, int times = 1);

/// Per-vertex patch data.
struct PatchTable {
  std::vector<int> free_vertices;
  /// Vertex id to position in free_vertices, -1 for Dirichlet vertices.
  std::vector<int> free_index;
  /// Incident cells per vertex, ascending.
  std::vector<std::vector<int>> incident;
  /// |omega_v| summed in ascending cell order.
  std::vector<double> patch_volume;
  /// h_v = |omega_v|^{1/d}.
  std::vector<double> local_size;
};

PatchTable build_patch_table(const SimplicialMesh& mesh);

struct ValidationReport {
  bool conforming = true;
  bool positive_volumes = true;
  bool gamma_consistent = true;
  bool shape_regular = true;
  bool k_mesh = true;
  double max_shape_ratio = 0.0;
  double max_neighbour_ratio = 0.0;
  std::vector<std::string> violations;

  bool ok() const noexcept {
    return conforming && positive_volumes && gamma_consistent && shape_regular && k_mesh;
  }
};

/// Checks conformity, positive volumes, gamma faces, shape regularity (d = 2,
/// circumradius/inradius) and the K-mesh property (d = 1).
ValidationReport validate(const SimplicialMesh& mesh, double rho_max = 10.0, double k_max = 2.0);

/// Plain-text serialization: header `d d' nv ne`, vertex lines, cell lines, gamma face lines.
void write_mesh(std::ostream& out, const SimplicialMesh& mesh);
SimplicialMesh read_mesh(std::istream& in);

}  // namespace opcond
