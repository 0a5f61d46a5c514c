#include <Eigen/LU>

#include "opcond/assembly.hpp"
#include "opcond/error.hpp"
#include "opcond/quadrature.hpp"

namespace opcond {

DenseOperator make_dense_operator(Eigen::MatrixXd values, SpaceKind space, std::vector<int> labels, bool symmetric) {
  DenseOperator op;
  op.matrix = std::make_shared<const Eigen::MatrixXd>(std::move(values));
  op.space = space;
  op.labels = std::move(labels);
  op.symmetric = symmetric;
  return op;
}

namespace {

/// Exact rule in barycentric coordinates with weights summing to 1.
struct CellRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
};

CellRule cell_rule(int dim, int points) {
  CellRule rule;
  if (dim == 1) {
    const LineRule g = gauss_legendre(points);
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      rule.bary.push_back({1.0 - g.points[i], g.points[i], 0.0});
      rule.weights.push_back(g.weights[i]);
    }
  } else {
    const TriangleRule t = collapsed_gauss(points);
    for (std::size_t i = 0; i < t.points.size(); ++i) {
      rule.bary.push_back({1.0 - t.points[i][0] - t.points[i][1], t.points[i][0], t.points[i][1]});
      rule.weights.push_back(2.0 * t.weights[i]);
    }
  }
  return rule;
}

/// Gradients of the barycentric coordinates of cell e (one 3-vector per vertex).
std::array<Eigen::Vector3d, 3> barycentric_gradients(const SimplicialMesh& mesh, int e) {
  const auto v = mesh.cell_vertices(e);
  auto P = [&](int k) {
    const Point& p = mesh.vertex(v[static_cast<std::size_t>(k)]);
    return Eigen::Vector3d(p[0], p[1], p[2]);
  };
  std::array<Eigen::Vector3d, 3> g{};
  if (mesh.dim() == 1) {
    const Eigen::Vector3d t = P(1) - P(0);
    g[1] = t / t.squaredNorm();
    g[0] = -g[1];
    g[2].setZero();
    return g;
  }
  Eigen::Matrix<double, 3, 2> J;
  J.col(0) = P(1) - P(0);
  J.col(1) = P(2) - P(0);
  const Eigen::Matrix<double, 3, 2> pinv = J * (J.transpose() * J).inverse();
  g[1] = pinv.col(0);
  g[2] = pinv.col(1);
  g[0] = -g[1] - g[2];
  return g;
}

enum class Form { mass, stiffness };

DenseOperator assemble_fem(const SimplicialMesh& mesh, int ell, Form form) {
  const LagrangeSpace space(mesh, ell);
  const int dim = mesh.dim();
  const int nb = space.nodes_per_cell();
  const CellRule rule = cell_rule(dim, ell + 1);
  const auto n = static_cast<Eigen::Index>(space.num_free());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> values(static_cast<std::size_t>(nb)), grads(static_cast<std::size_t>(nb * (dim + 1)));
  std::vector<Eigen::Vector3d> phys(static_cast<std::size_t>(nb));
  Eigen::MatrixXd local(nb, nb);
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    local.setZero();
    const auto bg = barycentric_gradients(mesh, e);
    for (std::size_t q = 0; q < rule.bary.size(); ++q) {
      const double w = rule.weights[q] * mesh.volume(e);
      if (form == Form::mass) {
        lagrange_values(dim, ell, space.lattice(), rule.bary[q].data(), values.data());
        for (int a = 0; a < nb; ++a)
          for (int b = 0; b < nb; ++b) local(a, b) += w * values[static_cast<std::size_t>(a)] * values[static_cast<std::size_t>(b)];
      } else {
        lagrange_barycentric_gradients(dim, ell, space.lattice(), rule.bary[q].data(), grads.data());
        for (int a = 0; a < nb; ++a) {
          Eigen::Vector3d g = Eigen::Vector3d::Zero();
          for (int i = 0; i <= dim; ++i) g += grads[static_cast<std::size_t>(a * (dim + 1) + i)] * bg[static_cast<std::size_t>(i)];
          phys[static_cast<std::size_t>(a)] = g;
        }
        for (int a = 0; a < nb; ++a)
          for (int b = 0; b < nb; ++b) local(a, b) += w * phys[static_cast<std::size_t>(a)].dot(phys[static_cast<std::size_t>(b)]);
      }
    }
    const auto& nodes = space.cell_nodes(e);
    for (int a = 0; a < nb; ++a) {
      const int r = space.free_index(nodes[static_cast<std::size_t>(a)]);
      if (r < 0) continue;
      for (int b = 0; b < nb; ++b) {
        const int c = space.free_index(nodes[static_cast<std::size_t>(b)]);
        if (c >= 0) M(r, c) += local(a, b);
      }
    }
  }
  return make_dense_operator(std::move(M), SpaceKind::lagrange, space.free_nodes());
}

}  // namespace

DenseOperator assemble_stiffness(const SimplicialMesh& mesh, int ell) { return assemble_fem(mesh, ell, Form::stiffness); }

DenseOperator assemble_mass(const SimplicialMesh& mesh, int ell) { return assemble_fem(mesh, ell, Form::mass); }

Eigen::VectorXd basis_integrals(const LagrangeSpace& space) {
  const SimplicialMesh& mesh = space.mesh();
  const int dim = mesh.dim();
  const int ell = space.degree();
  const int nb = space.nodes_per_cell();
  const CellRule rule = cell_rule(dim, ell + 1);
  std::vector<double> local(static_cast<std::size_t>(nb)), values(static_cast<std::size_t>(nb));
  std::fill(local.begin(), local.end(), 0.0);
  for (std::size_t q = 0; q < rule.bary.size(); ++q) {
    lagrange_values(dim, ell, space.lattice(), rule.bary[q].data(), values.data());
    for (int a = 0; a < nb; ++a) local[static_cast<std::size_t>(a)] += rule.weights[q] * values[static_cast<std::size_t>(a)];
  }
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.num_free()));
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const auto& nodes = space.cell_nodes(e);
    for (int a = 0; a < nb; ++a) {
      const int r = space.free_index(nodes[static_cast<std::size_t>(a)]);
      if (r >= 0) m[r] += mesh.volume(e) * local[static_cast<std::size_t>(a)];
    }
  }
  return m;
}

}  // namespace opcond
