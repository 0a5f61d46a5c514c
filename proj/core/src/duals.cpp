#include "opcond/duals.hpp"

#include <cmath>
#include <map>

#include "opcond/error.hpp"
#include "opcond/quadrature.hpp"

namespace opcond {

Eigen::VectorXd coupling_diagonal(const SimplicialMesh& mesh, DualVariant variant) {
  const PatchTable patches = build_patch_table(mesh);
  if (patches.free_vertices.empty()) throw Error(ErrorCode::invalid_mesh, "no free vertices");
  const double scale = variant == DualVariant::pwc ? 1.0 : 1.0 / (mesh.dim() + 1);
  Eigen::VectorXd d(static_cast<Eigen::Index>(patches.free_vertices.size()));
  for (std::size_t i = 0; i < patches.free_vertices.size(); ++i)
    d[static_cast<Eigen::Index>(i)] = scale * patches.patch_volume[static_cast<std::size_t>(patches.free_vertices[i])];
  return d;
}

SparseMatrix patch_incidence(const SimplicialMesh& mesh) {
  const PatchTable patches = build_patch_table(mesh);
  std::vector<Eigen::Triplet<double>> entries;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e)
    for (int v : mesh.cell_vertices(e)) {
      const int col = patches.free_index[static_cast<std::size_t>(v)];
      if (col >= 0) entries.emplace_back(e, col, 1.0);
    }
  SparseMatrix p(static_cast<Eigen::Index>(mesh.num_cells()), static_cast<Eigen::Index>(patches.free_vertices.size()));
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

Eigen::VectorXd bubble_diagonal(const Eigen::VectorXd& coupling, int dim, double s, double beta1) {
  if (!(beta1 > 0.0)) throw Error(ErrorCode::invalid_argument, "beta1 must be positive");
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::invalid_argument, "s must lie in [0, 1]");
  const double exponent = 1.0 + 2.0 * s / dim;
  return beta1 * coupling.array().pow(exponent).matrix();
}

Eigen::VectorXd bubble_diagonal(const SimplicialMesh& mesh, DualVariant variant, double s, double beta1) {
  return bubble_diagonal(coupling_diagonal(mesh, variant), mesh.dim(), s, beta1);
}

SparseMatrix linear_embedding(const LagrangeSpace& space) {
  const SimplicialMesh& mesh = space.mesh();
  const PatchTable patches = build_patch_table(mesh);
  const int ell = space.degree();
  std::map<std::pair<int, int>, double> entries;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const auto verts = mesh.cell_vertices(e);
    const auto& nodes = space.cell_nodes(e);
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      const int row = space.free_index(nodes[b]);
      if (row < 0) continue;
      for (int k = 0; k <= mesh.dim(); ++k) {
        const int col = patches.free_index[static_cast<std::size_t>(verts[static_cast<std::size_t>(k)])];
        const int a = space.lattice()[b][static_cast<std::size_t>(k)];
        if (col < 0 || a == 0) continue;
        entries[{row, col}] = static_cast<double>(a) / ell;
      }
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [rc, value] : entries) triplets.emplace_back(rc.first, rc.second, value);
  SparseMatrix q(static_cast<Eigen::Index>(space.num_free()), static_cast<Eigen::Index>(patches.free_vertices.size()));
  q.setFromTriplets(triplets.begin(), triplets.end());
  return q;
}

Eigen::VectorXd lagrange_node_diagonal(const LagrangeSpace& space, double s, double beta2) {
  if (!(beta2 > 0.0)) throw Error(ErrorCode::invalid_argument, "beta2 must be positive");
  const SimplicialMesh& mesh = space.mesh();
  const int dim = mesh.dim();
  const int ell = space.degree();
  const int nb = space.nodes_per_cell();
  // Reference points as barycentric coordinates with weights summing to 1 (volume fraction).
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weight;
  if (dim == 1) {
    const LineRule g = gauss_legendre(ell + 1);
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      bary.push_back({1.0 - g.points[i], g.points[i], 0.0});
      weight.push_back(g.weights[i]);
    }
  } else {
    const TriangleRule t = collapsed_gauss(ell + 1);
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      bary.push_back({1.0 - t.points[i][0] - t.points[i][1], t.points[i][0], t.points[i][1]});
      weight.push_back(2.0 * t.weights[i]);
    }
  }
  std::vector<double> local(static_cast<std::size_t>(nb), 0.0), values(static_cast<std::size_t>(nb));
  Eigen::VectorXd norm2 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.num_free()));
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < bary.size(); ++q) {
      lagrange_values(dim, ell, space.lattice(), bary[q].data(), values.data());
      for (int b = 0; b < nb; ++b) local[static_cast<std::size_t>(b)] += weight[q] * values[static_cast<std::size_t>(b)] * values[static_cast<std::size_t>(b)];
    }
    const double scale = mesh.volume(e) * std::pow(mesh.local_size(e), -2.0 * s);
    const auto& nodes = space.cell_nodes(e);
    for (int b = 0; b < nb; ++b) {
      const int row = space.free_index(nodes[static_cast<std::size_t>(b)]);
      if (row >= 0) norm2[row] += scale * local[static_cast<std::size_t>(b)];
    }
  }
  return beta2 * norm2.cwiseInverse();
}

}  // namespace opcond
