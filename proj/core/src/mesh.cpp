#include "opcond/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "opcond/error.hpp"

namespace opcond {

namespace {

double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::array<double, 3> cross(const Point& u, const Point& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

Point sub(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Face make_face(int a, int b) { return a < b ? Face{a, b} : Face{b, a}; }

}  // namespace

double simplex_volume(const SimplicialMesh& mesh, const Cell& cell) {
  if (mesh.dim() == 1) return distance(mesh.vertex(cell[0]), mesh.vertex(cell[1]));
  const auto n = cross(sub(mesh.vertex(cell[1]), mesh.vertex(cell[0])),
                       sub(mesh.vertex(cell[2]), mesh.vertex(cell[0])));
  return 0.5 * std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
}

SimplicialMesh::SimplicialMesh(int dim, int ambient_dim, std::vector<Point> vertices,
                               std::vector<Cell> cells, std::vector<Face> gamma_faces,
                               std::vector<int> generation, std::vector<int> parent)
    : dim_(dim),
      ambient_dim_(ambient_dim),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      gamma_faces_(std::move(gamma_faces)),
      generation_(std::move(generation)),
      parent_(std::move(parent)) {
  if (dim_ != 1 && dim_ != 2) throw Error(ErrorCode::invalid_mesh, "element dimension must be 1 or 2");
  if (ambient_dim_ != 1 && ambient_dim_ != 3)
    throw Error(ErrorCode::invalid_mesh, "ambient dimension must be 1 or 3");
  if (dim_ == 2 && ambient_dim_ != 3)
    throw Error(ErrorCode::invalid_mesh, "triangles must be embedded in 3D");
  const int nv = static_cast<int>(vertices_.size());
  for (auto& c : cells_) {
    for (int k = 0; k <= dim_; ++k) {
      if (c[k] < 0 || c[k] >= nv) throw Error(ErrorCode::invalid_mesh, "cell vertex index out of range");
    }
    if (dim_ == 1) c[2] = -1;
  }
  for (auto& f : gamma_faces_) {
    if (dim_ == 1) f[1] = f[0];
    f = make_face(f[0], f[1]);
    if (f[0] < 0 || f[1] >= nv) throw Error(ErrorCode::invalid_mesh, "gamma face index out of range");
  }
  std::sort(gamma_faces_.begin(), gamma_faces_.end());
  gamma_faces_.erase(std::unique(gamma_faces_.begin(), gamma_faces_.end()), gamma_faces_.end());
  gamma_vertex_.assign(vertices_.size(), 0);
  for (const auto& f : gamma_faces_) {
    gamma_vertex_[static_cast<std::size_t>(f[0])] = 1;
    gamma_vertex_[static_cast<std::size_t>(f[1])] = 1;
  }
  if (generation_.empty()) generation_.assign(cells_.size(), 0);
  if (parent_.empty()) parent_.assign(cells_.size(), -1);
  if (generation_.size() != cells_.size() || parent_.size() != cells_.size())
    throw Error(ErrorCode::invalid_mesh, "genealogy arrays do not match the cell count");
  volume_.resize(cells_.size());
  for (std::size_t e = 0; e < cells_.size(); ++e) {
    volume_[e] = simplex_volume(*this, cells_[e]);
    if (!(volume_[e] > 0.0)) throw Error(ErrorCode::invalid_mesh, "cell " + std::to_string(e) + " has zero volume");
  }
}

double SimplicialMesh::local_size(int e) const {
  return dim_ == 1 ? volume(e) : std::sqrt(volume(e));
}

double SimplicialMesh::total_volume() const {
  return std::accumulate(volume_.begin(), volume_.end(), 0.0);
}

double SimplicialMesh::min_local_size() const {
  double h = INFINITY;
  for (int e = 0; e < static_cast<int>(cells_.size()); ++e) h = std::min(h, local_size(e));
  return h;
}

double SimplicialMesh::diameter() const {
  if (ambient_dim_ == 1) {
    auto [lo, hi] = std::minmax_element(vertices_.begin(), vertices_.end(),
                                        [](const Point& a, const Point& b) { return a[0] < b[0]; });
    return (*hi)[0] - (*lo)[0];
  }
  double d = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) d = std::max(d, distance(vertices_[i], vertices_[j]));
  return d;
}

std::vector<int> SimplicialMesh::free_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(vertices_.size()); ++v)
    if (!on_gamma(v)) out.push_back(v);
  return out;
}

SimplicialMesh build_interval_mesh(const std::vector<double>& breakpoints, GammaSpec gamma) {
  if (breakpoints.size() < 2) throw Error(ErrorCode::invalid_argument, "an interval mesh needs at least one element");
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
      throw Error(ErrorCode::invalid_argument, "breakpoints must be strictly increasing");
    vertices.push_back({breakpoints[i], 0.0, 0.0});
  }
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    cells.push_back({static_cast<int>(i), static_cast<int>(i + 1), -1});
  std::vector<Face> gamma_faces;
  const int last = static_cast<int>(breakpoints.size()) - 1;
  if (gamma == GammaSpec::left || gamma == GammaSpec::both) gamma_faces.push_back({0, 0});
  if (gamma == GammaSpec::right || gamma == GammaSpec::both) gamma_faces.push_back({last, last});
  return SimplicialMesh(1, 1, std::move(vertices), std::move(cells), std::move(gamma_faces));
}

SimplicialMesh build_interval_mesh(std::size_t n, GammaSpec gamma, double a, double b) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "element count must be positive");
  if (!(b > a)) throw Error(ErrorCode::invalid_argument, "empty interval");
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  x[n] = b;
  return build_interval_mesh(x, gamma);
}

SimplicialMesh with_longest_edge_marking(const SimplicialMesh& mesh) {
  if (mesh.dim() != 2) return mesh;
  std::vector<Cell> cells = mesh.cells();
  for (auto& c : cells) {
    // Local edge k joins slots k and k+1 (mod 3).
    int best = 0;
    double best_len = -1.0;
    Face best_pair{};
    for (int k = 0; k < 3; ++k) {
      const int a = c[k], b = c[(k + 1) % 3];
      const double len = distance(mesh.vertex(a), mesh.vertex(b));
      const Face pair = make_face(a, b);
      if (len > best_len * (1.0 + 1e-12) ||
          (std::abs(len - best_len) <= 1e-12 * best_len && pair < best_pair)) {
        best = k;
        best_len = len;
        best_pair = pair;
      }
    }
    c = {c[best], c[(best + 1) % 3], c[(best + 2) % 3]};
  }
  std::vector<int> generation(mesh.num_cells());
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) generation[static_cast<std::size_t>(e)] = mesh.generation(e);
  return SimplicialMesh(2, 3, mesh.vertices(), std::move(cells), mesh.gamma_faces(), std::move(generation),
                        mesh.parents());
}

SimplicialMesh build_cube_surface_mesh() {
  std::vector<Point> vertices;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) vertices.push_back({double(x), double(y), double(z)});
  auto id = [](int x, int y, int z) { return 4 * x + 2 * y + z; };

  std::vector<Cell> cells;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const int u = (axis + 1) % 3, w = (axis + 2) % 3;
      auto corner = [&](int a, int b) {
        int c[3];
        c[axis] = side;
        c[u] = a;
        c[w] = b;
        return id(c[0], c[1], c[2]);
      };
      // The smallest corner has both varying coordinates zero; the diagonal joins it to (1, 1).
      const int c0 = corner(0, 0), c3 = corner(1, 1);
      for (int other : {corner(1, 0), corner(0, 1)}) {
        Cell cell{c0, c3, other};
        const auto n = cross(sub(vertices[static_cast<std::size_t>(c3)], vertices[static_cast<std::size_t>(c0)]),
                             sub(vertices[static_cast<std::size_t>(other)], vertices[static_cast<std::size_t>(c0)]));
        const double outward = side == 0 ? -1.0 : 1.0;
        if (n[static_cast<std::size_t>(axis)] * outward < 0.0) std::swap(cell[0], cell[1]);
        cells.push_back(cell);
      }
    }
  }
  return with_longest_edge_marking(SimplicialMesh(2, 3, std::move(vertices), std::move(cells)));
}

SimplicialMesh scaled(const SimplicialMesh& mesh, double factor) {
  std::vector<Point> vertices = mesh.vertices();
  for (auto& p : vertices)
    for (double& x : p) x *= factor;
  std::vector<int> generation(mesh.num_cells());
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) generation[static_cast<std::size_t>(e)] = mesh.generation(e);
  return SimplicialMesh(mesh.dim(), mesh.ambient_dim(), std::move(vertices), mesh.cells(), mesh.gamma_faces(),
                        std::move(generation), mesh.parents());
}

SimplicialMesh translated(const SimplicialMesh& mesh, const Point& offset) {
  std::vector<Point> vertices = mesh.vertices();
  for (auto& p : vertices)
    for (int k = 0; k < 3; ++k) p[static_cast<std::size_t>(k)] += offset[static_cast<std::size_t>(k)];
  std::vector<int> generation(mesh.num_cells());
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) generation[static_cast<std::size_t>(e)] = mesh.generation(e);
  return SimplicialMesh(mesh.dim(), mesh.ambient_dim(), std::move(vertices), mesh.cells(), mesh.gamma_faces(),
                        std::move(generation), mesh.parents());
}

std::vector<int> cells_touching(const SimplicialMesh& mesh, const std::vector<Point>& points) {
  std::vector<char> hit(mesh.num_vertices(), 0);
  for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v)
    for (const auto& p : points)
      if (mesh.vertex(v) == p) hit[static_cast<std::size_t>(v)] = 1;
  std::vector<int> out;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    for (int v : mesh.cell_vertices(e)) {
      if (hit[static_cast<std::size_t>(v)]) {
        out.push_back(e);
        break;
      }
    }
  }
  return out;
}

PatchTable build_patch_table(const SimplicialMesh& mesh) {
  PatchTable table;
  const std::size_t nv = mesh.num_vertices();
  table.incident.assign(nv, {});
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e)
    for (int v : mesh.cell_vertices(e)) table.incident[static_cast<std::size_t>(v)].push_back(e);
  table.patch_volume.assign(nv, 0.0);
  table.local_size.assign(nv, 0.0);
  table.free_index.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    double sum = 0.0;
    for (int e : table.incident[v]) sum += mesh.volume(e);
    table.patch_volume[v] = sum;
    table.local_size[v] = mesh.dim() == 1 ? sum : std::sqrt(sum);
    if (!mesh.on_gamma(static_cast<int>(v))) {
      table.free_index[v] = static_cast<int>(table.free_vertices.size());
      table.free_vertices.push_back(static_cast<int>(v));
    }
  }
  return table;
}

namespace {

void validate_interval(const SimplicialMesh& mesh, double k_max, ValidationReport& report) {
  std::vector<int> order(mesh.num_cells());
  std::iota(order.begin(), order.end(), 0);
  auto left = [&](int e) { return std::min(mesh.vertex(mesh.cell(e)[0])[0], mesh.vertex(mesh.cell(e)[1])[0]); };
  auto right = [&](int e) { return std::max(mesh.vertex(mesh.cell(e)[0])[0], mesh.vertex(mesh.cell(e)[1])[0]); };
  auto left_id = [&](int e) {
    const auto& c = mesh.cell(e);
    return mesh.vertex(c[0])[0] < mesh.vertex(c[1])[0] ? c[0] : c[1];
  };
  auto right_id = [&](int e) {
    const auto& c = mesh.cell(e);
    return mesh.vertex(c[0])[0] < mesh.vertex(c[1])[0] ? c[1] : c[0];
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return left(a) < left(b); });
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const int a = order[i], b = order[i + 1];
    if (right(a) > left(b)) {
      report.conforming = false;
      report.violations.push_back("cells " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
    } else if (right(a) == left(b)) {
      if (right_id(a) != left_id(b)) {
        report.conforming = false;
        report.violations.push_back("cells " + std::to_string(a) + " and " + std::to_string(b) +
                                    " touch without sharing a vertex");
      } else {
        const double ratio = std::max(mesh.volume(a) / mesh.volume(b), mesh.volume(b) / mesh.volume(a));
        report.max_neighbour_ratio = std::max(report.max_neighbour_ratio, ratio);
        if (ratio > k_max) {
          report.k_mesh = false;
          report.violations.push_back("neighbour ratio " + std::to_string(ratio) + " exceeds K_max");
        }
      }
    }
  }
}

void validate_surface(const SimplicialMesh& mesh, double rho_max, ValidationReport& report) {
  std::map<Face, int> edge_count;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const auto& c = mesh.cell(e);
    for (int k = 0; k < 3; ++k) ++edge_count[make_face(c[k], c[(k + 1) % 3])];
    const double a = distance(mesh.vertex(c[0]), mesh.vertex(c[1]));
    const double b = distance(mesh.vertex(c[1]), mesh.vertex(c[2]));
    const double cc = distance(mesh.vertex(c[2]), mesh.vertex(c[0]));
    const double area = mesh.volume(e);
    const double s = 0.5 * (a + b + cc);
    const double ratio = a * b * cc * s / (4.0 * area * area);
    report.max_shape_ratio = std::max(report.max_shape_ratio, ratio);
    if (ratio > rho_max) {
      report.shape_regular = false;
      report.violations.push_back("cell " + std::to_string(e) + " shape ratio " + std::to_string(ratio));
    }
  }
  std::vector<Face> open_edges;
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) {
      report.conforming = false;
      report.violations.push_back("edge (" + std::to_string(edge[0]) + "," + std::to_string(edge[1]) +
                                  ") shared by " + std::to_string(count) + " cells");
    } else if (count == 1) {
      open_edges.push_back(edge);
    }
  }
  // A hanging vertex lies in the interior of an edge that has only one neighbour.
  for (const auto& edge : open_edges) {
    const Point& p = mesh.vertex(edge[0]);
    const Point& q = mesh.vertex(edge[1]);
    const double len = distance(p, q);
    for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v) {
      if (v == edge[0] || v == edge[1]) continue;
      const Point& x = mesh.vertex(v);
      const double d = distance(p, x) + distance(x, q) - len;
      if (d <= 1e-12 * len) {
        report.conforming = false;
        report.violations.push_back("hanging vertex " + std::to_string(v) + " on edge (" + std::to_string(edge[0]) +
                                    "," + std::to_string(edge[1]) + ")");
      }
    }
  }
  for (const auto& f : mesh.gamma_faces()) {
    if (edge_count.find(f) == edge_count.end()) {
      report.gamma_consistent = false;
      report.violations.push_back("gamma face is not an edge of the mesh");
    }
  }
}

}  // namespace

ValidationReport validate(const SimplicialMesh& mesh, double rho_max, double k_max) {
  ValidationReport report;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    if (!(mesh.volume(e) > 0.0)) {
      report.positive_volumes = false;
      report.violations.push_back("cell " + std::to_string(e) + " has non-positive volume");
    }
  }
  if (mesh.dim() == 1) {
    validate_interval(mesh, k_max, report);
    for (const auto& f : mesh.gamma_faces()) {
      int count = 0;
      for (const auto& c : mesh.cells()) count += (c[0] == f[0]) + (c[1] == f[0]);
      if (count != 1) {
        report.gamma_consistent = false;
        report.violations.push_back("gamma vertex " + std::to_string(f[0]) + " is not a boundary point");
      }
    }
  } else {
    validate_surface(mesh, rho_max, report);
  }
  return report;
}

}  // namespace opcond
