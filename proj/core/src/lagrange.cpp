#include "opcond/lagrange.hpp"

#include <algorithm>
#include <map>

#include "opcond/error.hpp"

namespace opcond {

std::vector<LatticeIndex> reference_lattice(int dim, int ell) {
  std::vector<LatticeIndex> out;
  if (dim == 1) {
    out.push_back({ell, 0, 0});
    out.push_back({0, ell, 0});
    for (int k = 1; k < ell; ++k) out.push_back({ell - k, k, 0});
    return out;
  }
  out.push_back({ell, 0, 0});
  out.push_back({0, ell, 0});
  out.push_back({0, 0, ell});
  for (int e = 0; e < 3; ++e) {
    const int i = e, j = (e + 1) % 3;
    for (int k = 1; k < ell; ++k) {
      LatticeIndex a{0, 0, 0};
      a[static_cast<std::size_t>(i)] = ell - k;
      a[static_cast<std::size_t>(j)] = k;
      out.push_back(a);
    }
  }
  for (int a0 = 1; a0 < ell; ++a0)
    for (int a1 = 1; a0 + a1 < ell; ++a1) out.push_back({a0, a1, ell - a0 - a1});
  return out;
}

namespace {

/// Factor prod_{k<a} (ell x - k)/(k+1) and its derivative in x.
void factor(int ell, int a, double x, double& value, double& deriv) {
  value = 1.0;
  deriv = 0.0;
  for (int k = 0; k < a; ++k) {
    const double f = (ell * x - k) / (k + 1);
    const double df = static_cast<double>(ell) / (k + 1);
    deriv = deriv * f + value * df;
    value *= f;
  }
}

}  // namespace

void lagrange_values(int dim, int ell, const std::vector<LatticeIndex>& lattice, const double* lambda,
                     double* values) {
  for (std::size_t b = 0; b < lattice.size(); ++b) {
    double v = 1.0;
    for (int i = 0; i <= dim; ++i) {
      double f, df;
      factor(ell, lattice[b][static_cast<std::size_t>(i)], lambda[i], f, df);
      v *= f;
    }
    values[b] = v;
  }
}

void lagrange_barycentric_gradients(int dim, int ell, const std::vector<LatticeIndex>& lattice,
                                    const double* lambda, double* grads) {
  const int nb = dim + 1;
  for (std::size_t b = 0; b < lattice.size(); ++b) {
    double f[3], df[3];
    for (int i = 0; i < nb; ++i) factor(ell, lattice[b][static_cast<std::size_t>(i)], lambda[i], f[i], df[i]);
    for (int i = 0; i < nb; ++i) {
      double g = df[i];
      for (int j = 0; j < nb; ++j)
        if (j != i) g *= f[j];
      grads[b * static_cast<std::size_t>(nb) + static_cast<std::size_t>(i)] = g;
    }
  }
}

LagrangeSpace::LagrangeSpace(const SimplicialMesh& mesh, int ell) : mesh_(&mesh), ell_(ell) {
  if (ell < 1 || ell > 3) throw Error(ErrorCode::unsupported_degree, "Lagrange degree must be 1, 2 or 3");
  const int dim = mesh.dim();
  lattice_ = reference_lattice(dim, ell);
  const int nv = static_cast<int>(mesh.num_vertices());
  node_point_ = mesh.vertices();
  node_on_gamma_.assign(static_cast<std::size_t>(nv), 0);
  for (int v = 0; v < nv; ++v) node_on_gamma_[static_cast<std::size_t>(v)] = mesh.on_gamma(v) ? 1 : 0;

  std::map<Face, int> edge_base;
  std::vector<char> gamma_edge;
  auto add_node = [&](const Point& p, bool on_gamma) {
    node_point_.push_back(p);
    node_on_gamma_.push_back(on_gamma ? 1 : 0);
    return static_cast<int>(node_point_.size()) - 1;
  };
  auto point_at = [&](int e, const LatticeIndex& a) {
    Point p{0, 0, 0};
    const auto v = mesh.cell_vertices(e);
    for (int i = 0; i <= dim; ++i)
      for (int k = 0; k < 3; ++k)
        p[static_cast<std::size_t>(k)] += static_cast<double>(a[static_cast<std::size_t>(i)]) / ell *
                                          mesh.vertex(v[static_cast<std::size_t>(i)])[static_cast<std::size_t>(k)];
    return p;
  };

  cell_nodes_.assign(mesh.num_cells(), {});
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const auto v = mesh.cell_vertices(e);
    auto& nodes = cell_nodes_[static_cast<std::size_t>(e)];
    nodes.reserve(lattice_.size());
    for (const auto& a : lattice_) {
      int nonzero = 0, i = -1, j = -1;
      for (int s = 0; s <= dim; ++s) {
        if (a[static_cast<std::size_t>(s)] == 0) continue;
        ++nonzero;
        (i < 0 ? i : j) = s;
      }
      if (nonzero == 1) {
        nodes.push_back(v[static_cast<std::size_t>(i)]);
        continue;
      }
      if (nonzero == 2 && dim == 2) {
        const int vi = v[static_cast<std::size_t>(i)], vj = v[static_cast<std::size_t>(j)];
        const Face key = vi < vj ? Face{vi, vj} : Face{vj, vi};
        // Position counted from the smaller vertex id.
        const int k = vi < vj ? a[static_cast<std::size_t>(j)] : a[static_cast<std::size_t>(i)];
        auto it = edge_base.find(key);
        if (it == edge_base.end()) {
          const bool on_gamma = std::binary_search(mesh.gamma_faces().begin(), mesh.gamma_faces().end(), key);
          int base = -1;
          for (int t = 1; t < ell; ++t) {
            Point p{0, 0, 0};
            for (int c = 0; c < 3; ++c)
              p[static_cast<std::size_t>(c)] =
                  (1.0 - double(t) / ell) * mesh.vertex(key[0])[static_cast<std::size_t>(c)] +
                  double(t) / ell * mesh.vertex(key[1])[static_cast<std::size_t>(c)];
            const int id = add_node(p, on_gamma);
            if (t == 1) base = id;
          }
          it = edge_base.emplace(key, base).first;
        }
        nodes.push_back(it->second + k - 1);
        continue;
      }
      nodes.push_back(add_node(point_at(e, a), false));
    }
  }
  free_index_.assign(node_point_.size(), -1);
  for (int n = 0; n < static_cast<int>(node_point_.size()); ++n) {
    if (node_on_gamma_[static_cast<std::size_t>(n)]) continue;
    free_index_[static_cast<std::size_t>(n)] = static_cast<int>(free_nodes_.size());
    free_nodes_.push_back(n);
  }
}

}  // namespace opcond
