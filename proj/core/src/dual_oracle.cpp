#include <algorithm>
#include <cmath>

#include "opcond/duals.hpp"
#include "opcond/error.hpp"

namespace opcond {

namespace {

/// Fine cells grouped by coarse cell.
std::vector<std::vector<int>> children_of(const RedRefinement& r, std::size_t coarse_cells) {
  std::vector<std::vector<int>> out(coarse_cells);
  for (std::size_t f = 0; f < r.coarse_cell.size(); ++f)
    out[static_cast<std::size_t>(r.coarse_cell[f])].push_back(static_cast<int>(f));
  return out;
}

int local_slot(const SimplicialMesh& mesh, int cell, int vertex) {
  const auto v = mesh.cell_vertices(cell);
  for (std::size_t k = 0; k < v.size(); ++k)
    if (v[k] == vertex) return static_cast<int>(k);
  return -1;
}

/// Gathers the touched entries and clears the scratch vector.
PiecewiseConstant compress(std::vector<double>& dense, const std::vector<int>& touched) {
  PiecewiseConstant out;
  for (int f : touched) {
    double& v = dense[static_cast<std::size_t>(f)];
    out.emplace_back(f, v);
    v = 0.0;
  }
  return out;
}

}  // namespace

DualOracle dual_oracle_pwc(const SimplicialMesh& mesh, int refinement_depth) {
  const int d = mesh.dim();
  if (refinement_depth == 0) refinement_depth = d == 1 ? 2 : 1;
  if (d == 1 && refinement_depth != 2)
    throw Error(ErrorCode::unsupported_configuration, "d = 1 requires the two-fold refinement formula");
  if (refinement_depth != 1 && refinement_depth != 2)
    throw Error(ErrorCode::invalid_argument, "refinement depth must be 1 or 2");

  DualOracle oracle;
  oracle.variant = DualVariant::pwc;
  oracle.coupling = coupling_diagonal(mesh, DualVariant::pwc);
  oracle.free_vertices = mesh.free_vertices();
  oracle.once = red_refine(mesh, 1);
  if (refinement_depth == 2) {
    oracle.twice = red_refine(mesh, 2);
    oracle.psi_on_twice = true;
  }
  const RedRefinement& fine = oracle.psi_mesh();
  const auto children = children_of(fine, mesh.num_cells());
  const PatchTable patches = build_patch_table(mesh);

  // d >= 2: 2^{d+1} on the corner child minus the patch indicator.
  // d = 1: 16/3 on the corner grandchild minus 1/3 of the patch indicator.
  const double corner = refinement_depth == 1 ? std::ldexp(1.0, d + 1) : 16.0 / 3.0;
  const double patch = refinement_depth == 1 ? 1.0 : 1.0 / 3.0;
  std::vector<double> dense(fine.coarse_cell.size(), 0.0);
  for (int v : oracle.free_vertices) {
    std::vector<int> touched;
    for (int T : patches.incident[static_cast<std::size_t>(v)]) {
      for (int f : children[static_cast<std::size_t>(T)]) {
        dense[static_cast<std::size_t>(f)] -= patch;
        touched.push_back(f);
      }
      const int k = local_slot(mesh, T, v);
      dense[static_cast<std::size_t>(fine.corner_child[static_cast<std::size_t>(T)][static_cast<std::size_t>(k)])] += corner;
    }
    PiecewiseConstant psi = compress(dense, touched);
    PiecewiseConstant theta = psi;
    for (auto& [f, value] : theta) value -= 1.0;
    oracle.psi.push_back(std::move(psi));
    oracle.theta.push_back(std::move(theta));
  }
  return oracle;
}

DualOracle dual_oracle_cpl(const SimplicialMesh& mesh) {
  const int d = mesh.dim();
  DualOracle oracle;
  oracle.variant = DualVariant::cpl;
  oracle.coupling = coupling_diagonal(mesh, DualVariant::cpl);
  oracle.free_vertices = mesh.free_vertices();
  oracle.once = red_refine(mesh, 1);
  oracle.twice = red_refine(mesh, 2);
  oracle.psi_on_twice = true;
  const PatchTable patches = build_patch_table(mesh);

  // Second refinement of the once-refined mesh gives the parent at the intermediate level.
  const RedRefinement inner = red_refine(oracle.once.fine, 1);
  const auto grandchildren = children_of(inner, oracle.once.fine.num_cells());
  const auto children = children_of(oracle.once, mesh.num_cells());

  const double c = std::ldexp(1.0, d + 2) / (d + 2);
  const double two_d = std::ldexp(1.0, d);
  std::vector<double> dense(oracle.twice.coarse_cell.size(), 0.0);
  for (int v : oracle.free_vertices) {
    std::vector<int> touched;
    for (int T : patches.incident[static_cast<std::size_t>(v)]) {
      const int k = local_slot(mesh, T, v);
      const int star = oracle.once.corner_child[static_cast<std::size_t>(T)][static_cast<std::size_t>(k)];
      for (int f : grandchildren[static_cast<std::size_t>(star)]) {
        dense[static_cast<std::size_t>(f)] -= c;
        touched.push_back(f);
      }
      dense[static_cast<std::size_t>(oracle.twice.corner_child[static_cast<std::size_t>(T)][static_cast<std::size_t>(k)])] += c * two_d;
    }
    oracle.theta.push_back(compress(dense, touched));
  }

  const double inv = 1.0 / (d + 1);
  const double own = inv * d * std::ldexp(1.0, d + 1) / (d + 1);
  const double other = inv * std::ldexp(1.0, d + 1) / (d + 1);
  std::vector<double> dense_once(oracle.once.coarse_cell.size(), 0.0);
  for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v) {
    std::vector<int> touched;
    for (int T : patches.incident[static_cast<std::size_t>(v)]) {
      const int k = local_slot(mesh, T, v);
      for (int f : children[static_cast<std::size_t>(T)]) {
        dense_once[static_cast<std::size_t>(f)] += inv;
        touched.push_back(f);
      }
      for (int j = 0; j <= d; ++j) {
        const int child = oracle.once.corner_child[static_cast<std::size_t>(T)][static_cast<std::size_t>(j)];
        dense_once[static_cast<std::size_t>(child)] += j == k ? own : -other;
      }
    }
    oracle.phi_tilde.push_back(compress(dense_once, touched));
  }
  return oracle;
}

double pair_with_hat(const RedRefinement& refinement, const PiecewiseConstant& f, const SimplicialMesh& coarse,
                     int vertex) {
  const int nv = coarse.dim() + 1;
  double sum = 0.0;
  for (const auto& [cell, value] : f) {
    const int T = refinement.coarse_cell[static_cast<std::size_t>(cell)];
    const int k = local_slot(coarse, T, vertex);
    if (k < 0) continue;
    double centroid = 0.0;
    for (int i = 0; i < nv; ++i)
      centroid += refinement.barycentric[static_cast<std::size_t>(cell)][static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    sum += value * refinement.fine.volume(cell) * centroid / nv;
  }
  return sum;
}

double l2_product(const RedRefinement& refinement, const PiecewiseConstant& f, const PiecewiseConstant& g,
                  int coarse_cell) {
  std::vector<std::pair<int, double>> a = f, b = g;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      const int cell = a[i].first;
      if (coarse_cell < 0 || refinement.coarse_cell[static_cast<std::size_t>(cell)] == coarse_cell)
        sum += a[i].second * b[j].second * refinement.fine.volume(cell);
      ++i;
      ++j;
    }
  }
  return sum;
}

double hat_product(const SimplicialMesh& mesh, int v, int w) {
  const int d = mesh.dim();
  double sum = 0.0;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const int a = local_slot(mesh, e, v), b = local_slot(mesh, e, w);
    if (a < 0 || b < 0) continue;
    sum += mesh.volume(e) * (a == b ? 2.0 : 1.0) / ((d + 1) * (d + 2));
  }
  return sum;
}

}  // namespace opcond
