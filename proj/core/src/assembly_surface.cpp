#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "opcond/assembly.hpp"
#include "opcond/error.hpp"
#include "opcond/quadrature.hpp"

namespace opcond {

QuadratureSettings QuadratureSettings::standard() { return QuadratureSettings{}; }

QuadratureSettings QuadratureSettings::high() {
  QuadratureSettings s;
  s.singular_order = 8;
  s.subdivide_below = 2.0;
  s.far_orders = {{2.0, 8}, {4.0, 6}, {8.0, 5}};
  return s;
}

Eigen::MatrixXd HypersingularOperator::dense() const {
  Eigen::MatrixXd A = tilde.values();
  A.noalias() += alpha * moments * moments.transpose();
  return A;
}

Eigen::VectorXd HypersingularOperator::diagonal() const {
  return tilde.values().diagonal() + alpha * moments.cwiseAbs2();
}

namespace {

using Vec3 = Eigen::Vector3d;

struct Panel {
  std::array<Vec3, 3> p;
};

double panel_area(const Panel& t) { return 0.5 * (t.p[1] - t.p[0]).cross(t.p[2] - t.p[0]).norm(); }
Vec3 panel_centroid(const Panel& t) { return (t.p[0] + t.p[1] + t.p[2]) / 3.0; }
double panel_radius(const Panel& t) {
  const Vec3 c = panel_centroid(t);
  return std::max({(t.p[0] - c).norm(), (t.p[1] - c).norm(), (t.p[2] - c).norm()});
}

/// Lagrange basis of degree k on a triangle (k = 1: barycentrics, k = 2: six quadratics).
template <int NB>
struct Basis {
  static constexpr int degree = NB == 3 ? 1 : 2;
  std::vector<LatticeIndex> lattice = reference_lattice(2, degree);

  void eval(const double* lambda, double* out) const {
    if constexpr (NB == 3) {
      out[0] = lambda[0];
      out[1] = lambda[1];
      out[2] = lambda[2];
    } else {
      lagrange_values(2, degree, lattice, lambda, out);
    }
  }
};

/// Moments int int b_a(x) b_b(y) / (4 pi |x - y|) for every panel pair, in the cells' vertex order.
template <int NB>
class PairIntegrator {
 public:
  using Local = Eigen::Matrix<double, NB, NB>;

  PairIntegrator(const SimplicialMesh& mesh, const QuadratureSettings& settings) : mesh_(mesh), settings_(settings) {
    for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
      Panel t;
      for (int k = 0; k < 3; ++k) {
        const Point& p = mesh.vertex(mesh.cell(e)[static_cast<std::size_t>(k)]);
        t.p[static_cast<std::size_t>(k)] = Vec3(p[0], p[1], p[2]);
      }
      panels_.push_back(t);
      area_.push_back(panel_area(t));
    }
    // The transformed integrand is polynomial in xi (and eta1 for identical and shared-edge pairs);
    // the remaining directions carry the distance factor and get twice the order.
    const int n = settings.singular_order;
    singular_[0] = sauter_schwab_rule(PairClass::identical, {n, n, 2 * n, 2 * n});
    singular_[1] = sauter_schwab_rule(PairClass::common_edge, {n, n, 2 * n, 2 * n});
    singular_[2] = sauter_schwab_rule(PairClass::common_vertex, {n, 2 * n, 2 * n, 2 * n});
    int max_order = 2;
    for (const auto& [ratio, n] : settings.far_orders) max_order = std::max(max_order, n);
    far_.resize(static_cast<std::size_t>(max_order + 1));
    for (int n = 1; n <= max_order; ++n) {
      FarRule& r = far_[static_cast<std::size_t>(n)];
      const TriangleRule t = collapsed_gauss(n);
      r.points = t.points;
      r.weights = t.weights;
      r.values.resize(t.points.size() * NB);
      for (std::size_t q = 0; q < t.points.size(); ++q) {
        const double l[3] = {1.0 - t.points[q][0] - t.points[q][1], t.points[q][0], t.points[q][1]};
        basis_.eval(l, &r.values[q * NB]);
      }
    }
    // Transfer from a red child's basis to the parent basis: E(c, m) = parent basis m at child node c.
    const std::array<std::array<std::array<double, 3>, 3>, 4> child_bary = {{
        {{{1, 0, 0}, {0.5, 0.5, 0}, {0.5, 0, 0.5}}},
        {{{0.5, 0.5, 0}, {0, 1, 0}, {0, 0.5, 0.5}}},
        {{{0.5, 0, 0.5}, {0, 0.5, 0.5}, {0, 0, 1}}},
        {{{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}}},
    }};
    for (int c = 0; c < 4; ++c) {
      child_bary_[static_cast<std::size_t>(c)] = child_bary[static_cast<std::size_t>(c)];
      for (int node = 0; node < NB; ++node) {
        const LatticeIndex& a = basis_.lattice[static_cast<std::size_t>(node)];
        double l[3] = {0, 0, 0};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            l[j] += a[static_cast<std::size_t>(i)] / double(Basis<NB>::degree) * child_bary[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        double v[NB];
        basis_.eval(l, v);
        for (int m = 0; m < NB; ++m) transfer_[static_cast<std::size_t>(c)](node, m) = v[m];
      }
    }
  }

  /// Moment matrix of cells (i, j); rows follow cell i's local basis, columns cell j's.
  void moments(int i, int j, Local& out) const {
    out.setZero();
    const auto& ci = mesh_.cell(i);
    const auto& cj = mesh_.cell(j);
    int shared = 0;
    int si[3], sj[3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (ci[static_cast<std::size_t>(a)] == cj[static_cast<std::size_t>(b)]) {
          si[shared] = a;
          sj[shared] = b;
          ++shared;
        }
    // Work relative to a vertex of the first panel: differences of nearby stored coordinates are
    // exact, so x - y keeps full relative precision on tiny panels far from the origin.
    const Vec3 origin = panels_[static_cast<std::size_t>(i)].p[0];
    Panel Ti = panels_[static_cast<std::size_t>(i)], Tj = panels_[static_cast<std::size_t>(j)];
    for (int k = 0; k < 3; ++k) {
      Ti.p[static_cast<std::size_t>(k)] -= origin;
      Tj.p[static_cast<std::size_t>(k)] -= origin;
    }
    if (shared == 0) {
      SubPanel A{Ti, Local::Identity()};
      SubPanel B{Tj, Local::Identity()};
      regular(A, B, 0, out);
      out *= 1.0 / (4.0 * std::numbers::pi);
      return;
    }
    // Vertex order with the shared vertices first and in matching order.
    int pi[3], pj[3];
    for (int k = 0; k < shared; ++k) {
      pi[k] = si[k];
      pj[k] = sj[k];
    }
    complete(pi, shared);
    complete(pj, shared);
    const PairClass cls = shared == 3 ? PairClass::identical : shared == 2 ? PairClass::common_edge : PairClass::common_vertex;
    if (shared == 3) {
      for (int k = 0; k < 3; ++k) pi[k] = pj[k] = k;
    }
    const PairRule& rule = singular_[static_cast<std::size_t>(cls)];
    const double jac = 4.0 * area_[static_cast<std::size_t>(i)] * area_[static_cast<std::size_t>(j)];
    double bi[NB], bj[NB];
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      double li[3], lj[3];
      li[pi[0]] = 1.0 - rule.first[q][0] - rule.first[q][1];
      li[pi[1]] = rule.first[q][0];
      li[pi[2]] = rule.first[q][1];
      lj[pj[0]] = 1.0 - rule.second[q][0] - rule.second[q][1];
      lj[pj[1]] = rule.second[q][0];
      lj[pj[2]] = rule.second[q][1];
      const Vec3 x = li[0] * Ti.p[0] + li[1] * Ti.p[1] + li[2] * Ti.p[2];
      const Vec3 y = lj[0] * Tj.p[0] + lj[1] * Tj.p[1] + lj[2] * Tj.p[2];
      const double k = rule.weights[q] * jac / (x - y).norm();
      basis_.eval(li, bi);
      basis_.eval(lj, bj);
      for (int a = 0; a < NB; ++a) {
        const double ka = k * bi[a];
        for (int b = 0; b < NB; ++b) out(a, b) += ka * bj[b];
      }
    }
    out *= 1.0 / (4.0 * std::numbers::pi);
  }

 private:
  struct FarRule {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
    std::vector<double> values;  // NB per point
  };

  /// A piece of a panel and the map from its local basis to the original panel basis.
  struct SubPanel {
    Panel t;
    Local transfer;
  };

  static void complete(int* perm, int shared) {
    int n = shared;
    for (int k = 0; k < 3 && n < 3; ++k) {
      bool used = false;
      for (int s = 0; s < n; ++s) used |= perm[s] == k;
      if (!used) perm[n++] = k;
    }
  }

  int far_order(double ratio) const {
    int n = settings_.far_orders.front().second;
    for (const auto& [r, order] : settings_.far_orders)
      if (ratio >= r) n = order;
    return n;
  }

  std::array<SubPanel, 4> split(const SubPanel& s) const {
    std::array<SubPanel, 4> out;
    for (int c = 0; c < 4; ++c) {
      auto& child = out[static_cast<std::size_t>(c)];
      for (int k = 0; k < 3; ++k) {
        const auto& b = child_bary_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        child.t.p[static_cast<std::size_t>(k)] = b[0] * s.t.p[0] + b[1] * s.t.p[1] + b[2] * s.t.p[2];
      }
      child.transfer = transfer_[static_cast<std::size_t>(c)] * s.transfer;
    }
    return out;
  }

  void regular(const SubPanel& A, const SubPanel& B, int depth, Local& out) const {
    const Vec3 ca = panel_centroid(A.t), cb = panel_centroid(B.t);
    const double ra = panel_radius(A.t), rb = panel_radius(B.t);
    const double ratio = (ca - cb).norm() / (ra + rb);
    if (ratio < settings_.subdivide_below && depth < settings_.max_subdivision_depth) {
      if (ra >= rb) {
        for (const auto& child : split(A)) regular(child, B, depth + 1, out);
      } else {
        for (const auto& child : split(B)) regular(A, child, depth + 1, out);
      }
      return;
    }
    const FarRule& rule = far_[static_cast<std::size_t>(far_order(ratio))];
    const std::size_t nq = rule.weights.size();
    const double jac = 4.0 * panel_area(A.t) * panel_area(B.t);
    thread_local std::vector<Vec3> xa, xb;
    xa.resize(nq);
    xb.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) {
      const double u = rule.points[q][0], v = rule.points[q][1];
      xa[q] = (1 - u - v) * A.t.p[0] + u * A.t.p[1] + v * A.t.p[2];
      xb[q] = (1 - u - v) * B.t.p[0] + u * B.t.p[1] + v * B.t.p[2];
    }
    Local sub = Local::Zero();
    for (std::size_t p = 0; p < nq; ++p) {
      double row[NB] = {};
      for (std::size_t q = 0; q < nq; ++q) {
        const double k = rule.weights[q] / (xa[p] - xb[q]).norm();
        const double* bq = &rule.values[q * NB];
        for (int b = 0; b < NB; ++b) row[b] += k * bq[b];
      }
      const double* bp = &rule.values[p * NB];
      const double wp = rule.weights[p] * jac;
      for (int a = 0; a < NB; ++a)
        for (int b = 0; b < NB; ++b) sub(a, b) += wp * bp[a] * row[b];
    }
    out.noalias() += A.transfer.transpose() * sub * B.transfer;
  }

  const SimplicialMesh& mesh_;
  QuadratureSettings settings_;
  Basis<NB> basis_;
  std::vector<Panel> panels_;
  std::vector<double> area_;
  std::array<PairRule, 3> singular_;
  std::vector<FarRule> far_;
  std::array<std::array<std::array<double, 3>, 3>, 4> child_bary_{};
  std::array<Local, 4> transfer_{};
};

void check_surface(const SimplicialMesh& mesh) {
  if (mesh.dim() != 2 || mesh.ambient_dim() != 3) throw Error(ErrorCode::invalid_mesh, "surface operator needs a triangle mesh in 3D");
  for (std::size_t e = 0; e < mesh.num_cells(); ++e)
    if (!(mesh.volume(static_cast<int>(e)) > 0.0)) throw Error(ErrorCode::invalid_mesh, "degenerate panel " + std::to_string(e));
}

bool is_closed(const SimplicialMesh& mesh) {
  std::map<Face, int> count;
  for (const auto& c : mesh.cells())
    for (int k = 0; k < 3; ++k) {
      const int a = c[static_cast<std::size_t>(k)], b = c[static_cast<std::size_t>((k + 1) % 3)];
      ++count[a < b ? Face{a, b} : Face{b, a}];
    }
  for (const auto& [edge, n] : count)
    if (n != 2) return false;
  return mesh.gamma_faces().empty();
}

/// Surface curls of the degree-ell basis on cell e expressed in the degree-(ell-1) nodal basis:
/// result[k](a, m) is component k of curl phi_a at node m.
std::array<Eigen::MatrixXd, 3> curl_coefficients(const SimplicialMesh& mesh, int e, int ell,
                                                 const std::vector<LatticeIndex>& lattice) {
  const auto& c = mesh.cell(e);
  Vec3 P[3];
  for (int k = 0; k < 3; ++k) {
    const Point& p = mesh.vertex(c[static_cast<std::size_t>(k)]);
    P[k] = Vec3(p[0], p[1], p[2]);
  }
  Eigen::Matrix<double, 3, 2> J;
  J.col(0) = P[1] - P[0];
  J.col(1) = P[2] - P[0];
  const Vec3 n = J.col(0).cross(J.col(1)).normalized();
  const Eigen::Matrix<double, 3, 2> pinv = J * (J.transpose() * J).inverse();
  Vec3 grad_bary[3];
  grad_bary[1] = pinv.col(0);
  grad_bary[2] = pinv.col(1);
  grad_bary[0] = -grad_bary[1] - grad_bary[2];

  const int nb = static_cast<int>(lattice.size());
  const std::vector<LatticeIndex> low = ell == 1 ? std::vector<LatticeIndex>{{0, 0, 0}} : reference_lattice(2, ell - 1);
  const int nm = static_cast<int>(low.size());
  std::array<Eigen::MatrixXd, 3> out;
  for (auto& m : out) m.resize(nb, nm);
  std::vector<double> g(static_cast<std::size_t>(nb * 3));
  for (int m = 0; m < nm; ++m) {
    double l[3] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    if (ell > 1)
      for (int i = 0; i < 3; ++i) l[i] = low[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] / double(ell - 1);
    lagrange_barycentric_gradients(2, ell, lattice, l, g.data());
    for (int a = 0; a < nb; ++a) {
      Vec3 grad = Vec3::Zero();
      for (int i = 0; i < 3; ++i) grad += g[static_cast<std::size_t>(a * 3 + i)] * grad_bary[i];
      const Vec3 curl = n.cross(grad);
      for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(k)](a, m) = curl[k];
    }
  }
  return out;
}

template <int NB>
SurfaceOperators sweep(const SimplicialMesh& mesh, const SurfaceRequest& request, const QuadratureSettings& settings) {
  using Local = typename PairIntegrator<NB>::Local;
  const PairIntegrator<NB> integrator(mesh, settings);
  const int ne = static_cast<int>(mesh.num_cells());
  const PatchTable patches = build_patch_table(mesh);
  const int ell = request.hypersingular_degree;
  const bool high_order = request.hypersingular && ell > 1;
  const bool need_pwc = request.single_layer_pwc || (request.hypersingular && ell == 1);

  // Linear hats in the sweep basis (identity for NB = 3).
  Eigen::Matrix<double, NB, 3> to_linear;
  {
    const auto lat = reference_lattice(2, NB == 3 ? 1 : 2);
    for (int b = 0; b < NB; ++b)
      for (int k = 0; k < 3; ++k) to_linear(b, k) = lat[static_cast<std::size_t>(b)][static_cast<std::size_t>(k)] / double(NB == 3 ? 1 : 2);
  }

  Eigen::MatrixXd V;
  if (need_pwc) V.resize(ne, ne);
  Eigen::MatrixXd Vc;
  const auto nfree = static_cast<Eigen::Index>(patches.free_vertices.size());
  if (request.single_layer_cpl) Vc = Eigen::MatrixXd::Zero(nfree, nfree);

  std::unique_ptr<LagrangeSpace> space;
  std::vector<std::array<Eigen::MatrixXd, 3>> curls;
  Eigen::MatrixXd Ah;
  if (high_order) {
    space = std::make_unique<LagrangeSpace>(mesh, ell);
    for (int e = 0; e < ne; ++e) curls.push_back(curl_coefficients(mesh, e, ell, space->lattice()));
    Ah = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(space->num_free()), static_cast<Eigen::Index>(space->num_free()));
  }

  Local M;
  for (int i = 0; i < ne; ++i) {
    for (int j = i; j < ne; ++j) {
      integrator.moments(i, j, M);
      if (need_pwc) V(i, j) = V(j, i) = M.sum();
      if (request.single_layer_cpl) {
        const Eigen::Matrix3d L = to_linear.transpose() * M * to_linear;
        const auto& ci = mesh.cell(i);
        const auto& cj = mesh.cell(j);
        for (int a = 0; a < 3; ++a) {
          const int r = patches.free_index[static_cast<std::size_t>(ci[static_cast<std::size_t>(a)])];
          if (r < 0) continue;
          for (int b = 0; b < 3; ++b) {
            const int s = patches.free_index[static_cast<std::size_t>(cj[static_cast<std::size_t>(b)])];
            if (s < 0) continue;
            Vc(r, s) += L(a, b);
            if (i != j) Vc(s, r) += L(a, b);
          }
        }
      }
      if (high_order) {
        const auto& Ci = curls[static_cast<std::size_t>(i)];
        const auto& Cj = curls[static_cast<std::size_t>(j)];
        Eigen::MatrixXd local = Ci[0] * M * Cj[0].transpose();
        local.noalias() += Ci[1] * M * Cj[1].transpose();
        local.noalias() += Ci[2] * M * Cj[2].transpose();
        const auto& ni = space->cell_nodes(i);
        const auto& nj = space->cell_nodes(j);
        for (std::size_t a = 0; a < ni.size(); ++a) {
          const int r = space->free_index(ni[a]);
          if (r < 0) continue;
          for (std::size_t b = 0; b < nj.size(); ++b) {
            const int s = space->free_index(nj[b]);
            if (s < 0) continue;
            Ah(r, s) += local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            if (i != j) Ah(s, r) += local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
          }
        }
      }
    }
  }

  SurfaceOperators out;
  std::vector<int> cell_ids(static_cast<std::size_t>(ne));
  for (int e = 0; e < ne; ++e) cell_ids[static_cast<std::size_t>(e)] = e;
  if (request.hypersingular) {
    HypersingularOperator H;
    H.alpha = request.alpha;
    if (ell == 1) {
      // A~ = sum_k C_k^T V C_k with the constant curls of the hats per cell.
      std::array<std::vector<Eigen::Triplet<double>>, 3> entries;
      const std::vector<LatticeIndex> lat = reference_lattice(2, 1);
      for (int e = 0; e < ne; ++e) {
        const auto C = curl_coefficients(mesh, e, 1, lat);
        for (int a = 0; a < 3; ++a) {
          const int col = patches.free_index[static_cast<std::size_t>(mesh.cell(e)[static_cast<std::size_t>(a)])];
          if (col < 0) continue;
          for (int k = 0; k < 3; ++k) entries[static_cast<std::size_t>(k)].emplace_back(e, col, C[static_cast<std::size_t>(k)](a, 0));
        }
      }
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nfree, nfree);
      for (int k = 0; k < 3; ++k) {
        Eigen::SparseMatrix<double> C(ne, nfree);
        C.setFromTriplets(entries[static_cast<std::size_t>(k)].begin(), entries[static_cast<std::size_t>(k)].end());
        const Eigen::MatrixXd VC = V * C;
        A.noalias() += C.transpose() * VC;
      }
      A = 0.5 * (A + A.transpose()).eval();
      H.tilde = make_dense_operator(std::move(A), SpaceKind::cpl1, patches.free_vertices);
      H.moments = basis_integrals(LagrangeSpace(mesh, 1));
    } else {
      H.tilde = make_dense_operator(std::move(Ah), SpaceKind::lagrange, space->free_nodes());
      H.moments = basis_integrals(*space);
    }
    out.hypersingular = std::move(H);
  }
  if (request.single_layer_pwc) out.single_layer_pwc = make_dense_operator(std::move(V), SpaceKind::pwc0, cell_ids);
  if (request.single_layer_cpl) out.single_layer_cpl = make_dense_operator(std::move(Vc), SpaceKind::cpl1, patches.free_vertices);
  return out;
}

}  // namespace

SurfaceOperators assemble_surface_operators(const SimplicialMesh& mesh, const SurfaceRequest& request,
                                            const QuadratureSettings& settings) {
  check_surface(mesh);
  if (request.hypersingular) {
    if (!(request.alpha >= 0.0)) throw Error(ErrorCode::invalid_argument, "alpha must be nonnegative");
    if (!is_closed(mesh)) throw Error(ErrorCode::unsupported_configuration, "the hypersingular operator needs a closed surface");
    if (request.hypersingular_degree < 1 || request.hypersingular_degree > 3)
      throw Error(ErrorCode::unsupported_degree, "hypersingular degree must be 1, 2 or 3");
  }
  if (request.hypersingular && request.hypersingular_degree == 3) return sweep<6>(mesh, request, settings);
  return sweep<3>(mesh, request, settings);
}

DenseOperator assemble_single_layer_3d(const SimplicialMesh& mesh, SpaceKind space, const QuadratureSettings& settings) {
  SurfaceRequest request;
  if (space == SpaceKind::pwc0)
    request.single_layer_pwc = true;
  else if (space == SpaceKind::cpl1)
    request.single_layer_cpl = true;
  else
    throw Error(ErrorCode::unsupported_configuration, "surface single layer supports pwc0 and cpl1");
  SurfaceOperators ops = assemble_surface_operators(mesh, request, settings);
  return space == SpaceKind::pwc0 ? *ops.single_layer_pwc : *ops.single_layer_cpl;
}

HypersingularOperator assemble_hypersingular_3d(const SimplicialMesh& mesh, double alpha, int ell,
                                                const QuadratureSettings& settings) {
  SurfaceRequest request;
  request.hypersingular = true;
  request.hypersingular_degree = ell;
  request.alpha = alpha;
  return *assemble_surface_operators(mesh, request, settings).hypersingular;
}

}  // namespace opcond
