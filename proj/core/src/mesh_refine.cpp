#include <algorithm>
#include <map>

#include "opcond/error.hpp"
#include "opcond/mesh.hpp"

namespace opcond {

namespace {

Face edge_key(int a, int b) { return a < b ? Face{a, b} : Face{b, a}; }

Point midpoint(const Point& a, const Point& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

/// Midpoint vertices created on demand, keyed by edge.
class MidpointTable {
 public:
  explicit MidpointTable(std::vector<Point>& vertices) : vertices_(vertices) {}

  int get(int a, int b) {
    const Face key = edge_key(a, b);
    auto it = mid_.find(key);
    if (it != mid_.end()) return it->second;
    const int id = static_cast<int>(vertices_.size());
    vertices_.push_back(midpoint(vertices_[static_cast<std::size_t>(a)], vertices_[static_cast<std::size_t>(b)]));
    mid_.emplace(key, id);
    return id;
  }

  const int* find(int a, int b) const {
    auto it = mid_.find(edge_key(a, b));
    return it == mid_.end() ? nullptr : &it->second;
  }

 private:
  std::vector<Point>& vertices_;
  std::map<Face, int> mid_;
};

std::vector<Face> split_gamma(const SimplicialMesh& mesh, const MidpointTable& mids) {
  std::vector<Face> out;
  for (const auto& f : mesh.gamma_faces()) {
    if (mesh.dim() == 2) {
      if (const int* m = mids.find(f[0], f[1])) {
        out.push_back(edge_key(f[0], *m));
        out.push_back(edge_key(*m, f[1]));
        continue;
      }
    }
    out.push_back(f);
  }
  return out;
}

SimplicialMesh refine_interval(const SimplicialMesh& mesh, const std::vector<char>& marked) {
  std::vector<Point> vertices = mesh.vertices();
  MidpointTable mids(vertices);
  std::vector<Cell> cells;
  std::vector<int> generation, parent;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const Cell& c = mesh.cell(e);
    if (marked[static_cast<std::size_t>(e)]) {
      const int m = mids.get(c[0], c[1]);
      cells.push_back({c[0], m, -1});
      cells.push_back({m, c[1], -1});
      for (int k = 0; k < 2; ++k) {
        generation.push_back(mesh.generation(e) + 1);
        parent.push_back(e);
      }
    } else {
      cells.push_back(c);
      generation.push_back(mesh.generation(e));
      parent.push_back(e);
    }
  }
  return SimplicialMesh(1, mesh.ambient_dim(), std::move(vertices), std::move(cells), mesh.gamma_faces(),
                        std::move(generation), std::move(parent));
}

}  // namespace

SimplicialMesh refine_nvb_conforming(const SimplicialMesh& mesh, const std::vector<int>& marked) {
  const int ne = static_cast<int>(mesh.num_cells());
  std::vector<char> mark(static_cast<std::size_t>(ne), 0);
  for (int e : marked) {
    if (e < 0 || e >= ne) throw Error(ErrorCode::invalid_argument, "marked cell id out of range");
    mark[static_cast<std::size_t>(e)] = 1;
  }
  if (mesh.dim() == 1) return refine_interval(mesh, mark);

  // Edge marks; the closure marks the refinement edge of every cell with a marked edge.
  std::map<Face, char> edge_mark;
  for (int e = 0; e < ne; ++e) {
    const Cell& c = mesh.cell(e);
    for (int k = 0; k < 3; ++k) edge_mark.emplace(edge_key(c[k], c[(k + 1) % 3]), 0);
  }
  for (int e = 0; e < ne; ++e)
    if (mark[static_cast<std::size_t>(e)]) edge_mark[edge_key(mesh.cell(e)[0], mesh.cell(e)[1])] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (int e = 0; e < ne; ++e) {
      const Cell& c = mesh.cell(e);
      char& ref = edge_mark[edge_key(c[0], c[1])];
      if (ref) continue;
      if (edge_mark[edge_key(c[1], c[2])] || edge_mark[edge_key(c[2], c[0])]) {
        ref = 1;
        changed = true;
      }
    }
  }

  std::vector<Point> vertices = mesh.vertices();
  MidpointTable mids(vertices);
  std::vector<Cell> cells;
  std::vector<int> generation, parent;
  auto is_marked = [&](int a, int b) {
    auto it = edge_mark.find(edge_key(a, b));
    return it != edge_mark.end() && it->second;
  };
  // Children of (a, b, c) with newest vertex m on (a, b): (c, a, m) and (b, c, m).
  auto emit = [&](auto&& self, const Cell& c, int gen, int from) -> void {
    if (!is_marked(c[0], c[1])) {
      cells.push_back(c);
      generation.push_back(gen);
      parent.push_back(from);
      return;
    }
    const int m = mids.get(c[0], c[1]);
    self(self, Cell{c[2], c[0], m}, gen + 1, from);
    self(self, Cell{c[1], c[2], m}, gen + 1, from);
  };
  for (int e = 0; e < ne; ++e) emit(emit, mesh.cell(e), mesh.generation(e), e);

  auto gamma = split_gamma(mesh, mids);
  return SimplicialMesh(2, 3, std::move(vertices), std::move(cells), std::move(gamma), std::move(generation),
                        std::move(parent));
}

SimplicialMesh refine_uniform_bisection(const SimplicialMesh& mesh) {
  std::vector<int> all(mesh.num_cells());
  for (std::size_t e = 0; e < all.size(); ++e) all[e] = static_cast<int>(e);
  if (mesh.dim() == 1) return refine_nvb_conforming(mesh, all);

  std::vector<Point> vertices = mesh.vertices();
  MidpointTable mids(vertices);
  std::vector<Cell> cells;
  std::vector<int> generation, parent;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const Cell& c = mesh.cell(e);
    const int m = mids.get(c[0], c[1]);
    cells.push_back({c[2], c[0], m});
    cells.push_back({c[1], c[2], m});
    for (int k = 0; k < 2; ++k) {
      generation.push_back(mesh.generation(e) + 1);
      parent.push_back(e);
    }
  }
  auto gamma = split_gamma(mesh, mids);
  return SimplicialMesh(2, 3, std::move(vertices), std::move(cells), std::move(gamma), std::move(generation),
                        std::move(parent));
}

namespace {

RedRefinement red_refine_once(const SimplicialMesh& mesh) {
  RedRefinement out;
  std::vector<Point> vertices = mesh.vertices();
  MidpointTable mids(vertices);
  std::vector<Cell> cells;
  std::vector<int> generation, parent;
  const int ne = static_cast<int>(mesh.num_cells());
  out.corner_child.assign(static_cast<std::size_t>(ne), {-1, -1, -1});
  auto push = [&](const Cell& c, int e, const std::array<Point, 3>& bary) {
    cells.push_back(c);
    generation.push_back(mesh.generation(e) + 1);
    parent.push_back(e);
    out.coarse_cell.push_back(e);
    out.barycentric.push_back(bary);
    return static_cast<int>(cells.size()) - 1;
  };
  for (int e = 0; e < ne; ++e) {
    const Cell& c = mesh.cell(e);
    if (mesh.dim() == 1) {
      const int m = mids.get(c[0], c[1]);
      out.corner_child[static_cast<std::size_t>(e)][0] = push({c[0], m, -1}, e, {{{1, 0, 0}, {0.5, 0.5, 0}, {}}});
      out.corner_child[static_cast<std::size_t>(e)][1] = push({m, c[1], -1}, e, {{{0.5, 0.5, 0}, {0, 1, 0}, {}}});
      continue;
    }
    const int m01 = mids.get(c[0], c[1]), m12 = mids.get(c[1], c[2]), m20 = mids.get(c[2], c[0]);
    const Point b0{1, 0, 0}, b1{0, 1, 0}, b2{0, 0, 1};
    const Point h01{0.5, 0.5, 0}, h12{0, 0.5, 0.5}, h20{0.5, 0, 0.5};
    auto& corner = out.corner_child[static_cast<std::size_t>(e)];
    corner[0] = push({c[0], m01, m20}, e, {b0, h01, h20});
    corner[1] = push({m01, c[1], m12}, e, {h01, b1, h12});
    corner[2] = push({m20, m12, c[2]}, e, {h20, h12, b2});
    push({m12, m20, m01}, e, {h12, h20, h01});
  }
  auto gamma = split_gamma(mesh, mids);
  if (mesh.dim() == 1) gamma = mesh.gamma_faces();
  out.fine = SimplicialMesh(mesh.dim(), mesh.ambient_dim(), std::move(vertices), std::move(cells), std::move(gamma),
                            std::move(generation), std::move(parent));
  return out;
}

}  // namespace

RedRefinement red_refine(const SimplicialMesh& mesh, int times) {
  if (times < 1) throw Error(ErrorCode::invalid_argument, "red refinement count must be positive");
  RedRefinement result = red_refine_once(mesh);
  for (int t = 1; t < times; ++t) {
    RedRefinement next = red_refine_once(result.fine);
    const int nv = mesh.dim() + 1;
    for (std::size_t f = 0; f < next.coarse_cell.size(); ++f) {
      const int mid = next.coarse_cell[f];
      std::array<Point, 3> composed{};
      for (int k = 0; k < nv; ++k) {
        for (int j = 0; j < 3; ++j) {
          double s = 0.0;
          for (int i = 0; i < nv; ++i)
            s += next.barycentric[f][static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                 result.barycentric[static_cast<std::size_t>(mid)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          composed[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = s;
        }
      }
      next.barycentric[f] = composed;
      next.coarse_cell[f] = result.coarse_cell[static_cast<std::size_t>(mid)];
    }
    std::vector<std::array<int, 3>> corner(result.corner_child.size(), {-1, -1, -1});
    for (std::size_t e = 0; e < corner.size(); ++e) {
      for (int k = 0; k < nv; ++k) {
        const int child = result.corner_child[e][static_cast<std::size_t>(k)];
        // The corner child keeps the coarse vertex at its own local slot k.
        corner[e][static_cast<std::size_t>(k)] =
            next.corner_child[static_cast<std::size_t>(child)][static_cast<std::size_t>(k)];
      }
    }
    next.corner_child = std::move(corner);
    result = std::move(next);
  }
  return result;
}

}  // namespace opcond
