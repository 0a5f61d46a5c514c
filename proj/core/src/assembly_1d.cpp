#include <algorithm>
#include <cmath>
#include <numbers>

#include "opcond/assembly.hpp"
#include "opcond/error.hpp"
#include "opcond/quadrature.hpp"

namespace opcond {

namespace {

/// Polynomial in t, ascending coefficients, degree <= 4.
using Poly = std::array<double, 5>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; i + j < 5; ++j) c[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
  return c;
}

Poly poly_pow(const Poly& a, int k) {
  Poly r{1, 0, 0, 0, 0};
  for (int i = 0; i < k; ++i) r = poly_mul(r, a);
  return r;
}

/// Antiderivative of t^k ln|t| vanishing at t = 0.
double log_antiderivative(int k, double t) {
  if (t == 0.0) return 0.0;
  const double k1 = k + 1.0;
  return std::pow(t, k + 1) * (std::log(std::abs(t)) / k1 - 1.0 / (k1 * k1));
}

/// m(p, q) = int_0^hx int_c^d x^p y^q ln|x - y| dy dx for p, q in {0, 1}.
/// All coordinates are local (the first interval starts at 0) so no large offsets cancel.
Eigen::Matrix2d log_moments_local(double hx, double c, double d) {
  // With t = x - y the y-range for fixed t is [max(c, -t), min(d, hx - t)].
  std::array<double, 4> breaks{-d, -c, hx - d, hx - c};
  std::sort(breaks.begin(), breaks.end());
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  for (int piece = 0; piece < 3; ++piece) {
    const double t0 = breaks[static_cast<std::size_t>(piece)], t1 = breaks[static_cast<std::size_t>(piece + 1)];
    if (!(t1 > t0)) continue;
    const double tm = 0.5 * (t0 + t1);
    // Linear bounds L(t) = l0 + l1 t and U(t) = u0 + u1 t on this piece.
    const Poly L = -tm > c ? Poly{0, -1, 0, 0, 0} : Poly{c, 0, 0, 0, 0};
    const Poly U = hx - tm < d ? Poly{hx, -1, 0, 0, 0} : Poly{d, 0, 0, 0, 0};
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        // (t + y)^p y^q integrated over y in [L, U]; p <= 1 so every binomial factor is 1.
        Poly Q{};
        for (int j = 0; j <= p; ++j) {
          const Poly tpow = poly_pow(Poly{0, 1, 0, 0, 0}, p - j);
          const int mexp = j + q + 1;
          Poly diff = poly_pow(U, mexp);
          const Poly lo = poly_pow(L, mexp);
          for (int i = 0; i < 5; ++i) diff[static_cast<std::size_t>(i)] = (diff[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / mexp;
          const Poly term = poly_mul(tpow, diff);
          for (int i = 0; i < 5; ++i) Q[static_cast<std::size_t>(i)] += term[static_cast<std::size_t>(i)];
        }
        double s = 0.0;
        for (int k = 0; k < 5; ++k) {
          if (Q[static_cast<std::size_t>(k)] == 0.0) continue;
          s += Q[static_cast<std::size_t>(k)] * (log_antiderivative(k, t1) - log_antiderivative(k, t0));
        }
        m(p, q) += s;
      }
    }
  }
  return m;
}

struct Interval {
  double a, b;    // a < b
  int left, right;  // vertex ids at a and b
};

Interval interval_of(const SimplicialMesh& mesh, int e) {
  const auto& c = mesh.cell(e);
  const double x0 = mesh.vertex(c[0])[0], x1 = mesh.vertex(c[1])[0];
  return x0 < x1 ? Interval{x0, x1, c[0], c[1]} : Interval{x1, x0, c[1], c[0]};
}

/// Moments of ln|x - y| against the linear basis (left hat, right hat) on I x J.
Eigen::Matrix2d log_hat_moments(const Interval& I, const Interval& J) {
  const double hI = I.b - I.a, hJ = J.b - J.a;
  const double gap = std::max(J.a - I.b, I.a - J.b);
  const double hmax = std::max(hI, hJ);
  if (gap < hmax) {
    const double c = J.a - I.a, d = J.b - I.a;
    const Eigen::Matrix2d m = log_moments_local(hI, c, d);
    // Hats in the monomials {1, x'} and {1, y'} (local coordinates relative to I.a).
    Eigen::Matrix2d CI, CJ;
    CI << 1.0, -1.0 / hI, 0.0, 1.0 / hI;
    CJ << 1.0 + c / hJ, -1.0 / hJ, -c / hJ, 1.0 / hJ;
    return CI * m * CJ.transpose();
  }
  // Separated: the kernel is analytic on I x J, choose the rule from the Bernstein ellipse.
  const double delta = std::abs(0.5 * (I.a + I.b) - 0.5 * (J.a + J.b)) / (0.5 * hmax);
  const double rho = delta + std::sqrt(delta * delta - 1.0);
  const int n = std::clamp(static_cast<int>(std::ceil(36.0 / (2.0 * std::log(rho)))) + 1, 2, 14);
  const LineRule g = gauss_legendre(n);
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const double si = g.points[static_cast<std::size_t>(i)];
    const double x = I.a + hI * si;
    for (int j = 0; j < n; ++j) {
      const double tj = g.points[static_cast<std::size_t>(j)];
      const double y = J.a + hJ * tj;
      const double w = g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)] * hI * hJ *
                       std::log(std::abs(x - y));
      m(0, 0) += w * (1 - si) * (1 - tj);
      m(0, 1) += w * (1 - si) * tj;
      m(1, 0) += w * si * (1 - tj);
      m(1, 1) += w * si * tj;
    }
  }
  return m;
}

double resolve_scale(const SimplicialMesh& mesh, double scale) {
  const double diam = mesh.diameter();
  if (scale == 0.0) scale = 2.0 * diam;
  if (!(scale > diam)) throw Error(ErrorCode::coercivity_risk, "log scale L must exceed the domain diameter");
  return scale;
}

void require_interval(const SimplicialMesh& mesh) {
  if (mesh.dim() != 1) throw Error(ErrorCode::invalid_mesh, "interval operator requested on a surface mesh");
}

}  // namespace

DenseOperator assemble_single_layer_1d(const SimplicialMesh& mesh, SpaceKind space, double scale) {
  require_interval(mesh);
  const double L = resolve_scale(mesh, scale);
  const double lnL = std::log(L);
  const double c = -0.5 / std::numbers::pi;
  const int ne = static_cast<int>(mesh.num_cells());
  std::vector<Interval> cells;
  for (int e = 0; e < ne; ++e) cells.push_back(interval_of(mesh, e));

  if (space == SpaceKind::pwc0) {
    Eigen::MatrixXd V(ne, ne);
    for (int i = 0; i < ne; ++i) {
      for (int j = i; j < ne; ++j) {
        const Eigen::Matrix2d m = log_hat_moments(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
        const double hi = cells[static_cast<std::size_t>(i)].b - cells[static_cast<std::size_t>(i)].a;
        const double hj = cells[static_cast<std::size_t>(j)].b - cells[static_cast<std::size_t>(j)].a;
        V(i, j) = V(j, i) = c * (m.sum() - lnL * hi * hj);
      }
    }
    std::vector<int> labels(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) labels[static_cast<std::size_t>(e)] = e;
    return make_dense_operator(std::move(V), SpaceKind::pwc0, std::move(labels));
  }
  if (space != SpaceKind::cpl1) throw Error(ErrorCode::unsupported_configuration, "1D single layer supports pwc0 and cpl1");

  const PatchTable patches = build_patch_table(mesh);
  const auto n = static_cast<Eigen::Index>(patches.free_vertices.size());
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < ne; ++i) {
    const Interval& I = cells[static_cast<std::size_t>(i)];
    const int ri[2] = {patches.free_index[static_cast<std::size_t>(I.left)], patches.free_index[static_cast<std::size_t>(I.right)]};
    for (int j = 0; j < ne; ++j) {
      const Interval& J = cells[static_cast<std::size_t>(j)];
      const int rj[2] = {patches.free_index[static_cast<std::size_t>(J.left)], patches.free_index[static_cast<std::size_t>(J.right)]};
      const Eigen::Matrix2d m = i <= j ? log_hat_moments(I, J) : Eigen::Matrix2d(log_hat_moments(J, I).transpose());
      const double hi = I.b - I.a, hj = J.b - J.a;
      for (int a = 0; a < 2; ++a) {
        if (ri[a] < 0) continue;
        for (int b = 0; b < 2; ++b) {
          if (rj[b] < 0) continue;
          V(ri[a], rj[b]) += c * (m(a, b) - lnL * 0.25 * hi * hj);
        }
      }
    }
  }
  return make_dense_operator(std::move(V), SpaceKind::cpl1, patches.free_vertices);
}

Eigen::SparseMatrix<double> interval_derivative(const SimplicialMesh& mesh) {
  require_interval(mesh);
  const PatchTable patches = build_patch_table(mesh);
  std::vector<Eigen::Triplet<double>> entries;
  for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e) {
    const Interval I = interval_of(mesh, e);
    const double h = I.b - I.a;
    const int l = patches.free_index[static_cast<std::size_t>(I.left)];
    const int r = patches.free_index[static_cast<std::size_t>(I.right)];
    if (l >= 0) entries.emplace_back(e, l, -1.0 / h);
    if (r >= 0) entries.emplace_back(e, r, 1.0 / h);
  }
  Eigen::SparseMatrix<double> G(static_cast<Eigen::Index>(mesh.num_cells()),
                                static_cast<Eigen::Index>(patches.free_vertices.size()));
  G.setFromTriplets(entries.begin(), entries.end());
  return G;
}

DenseOperator assemble_hypersingular_1d(const SimplicialMesh& mesh, double scale) {
  require_interval(mesh);
  const auto& gamma = mesh.gamma_faces();
  int boundary_marked = 0;
  for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v) {
    int count = 0;
    for (const auto& c : mesh.cells()) count += (c[0] == v) + (c[1] == v);
    if (count == 1 && mesh.on_gamma(v)) ++boundary_marked;
  }
  if (boundary_marked != 2 || gamma.size() != 2)
    throw Error(ErrorCode::unsupported_configuration, "the screen hypersingular operator needs both endpoints on gamma");
  const DenseOperator V = assemble_single_layer_1d(mesh, SpaceKind::pwc0, scale);
  const Eigen::SparseMatrix<double> G = interval_derivative(mesh);
  const Eigen::MatrixXd VG = V.values() * G;
  Eigen::MatrixXd A = G.transpose() * VG;
  A = 0.5 * (A + A.transpose()).eval();
  return make_dense_operator(std::move(A), SpaceKind::cpl1, mesh.free_vertices());
}

DenseOperator assemble_greens_1d(const SimplicialMesh& mesh, SpaceKind space) {
  require_interval(mesh);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : mesh.vertices()) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  if (std::abs(lo) > 1e-14 || std::abs(hi - 1.0) > 1e-14)
    throw Error(ErrorCode::rescale_required, "the Green's kernel operator is defined on (0, 1)");
  const int ne = static_cast<int>(mesh.num_cells());
  std::vector<Interval> cells;
  for (int e = 0; e < ne; ++e) cells.push_back(interval_of(mesh, e));

  // Degree <= 4 integrands on triangles and squares: 3 Gauss points per direction are exact.
  const LineRule g = gauss_legendre(3);
  const TriangleRule t = collapsed_gauss(3);
  auto kernel = [](double x, double y) { return std::min(x, y) - x * y; };
  auto moments = [&](const Interval& I, const Interval& J) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    const double hI = I.b - I.a, hJ = J.b - J.a;
    auto add = [&](double s, double r, double w) {
      const double k = w * kernel(I.a + hI * s, J.a + hJ * r);
      m(0, 0) += k * (1 - s) * (1 - r);
      m(0, 1) += k * (1 - s) * r;
      m(1, 0) += k * s * (1 - r);
      m(1, 1) += k * s * r;
    };
    if (I.a == J.a && I.b == J.b) {
      // Split the square along its diagonal where min(x, y) changes branch.
      for (std::size_t q = 0; q < t.points.size(); ++q) {
        const double u = t.points[q][0], v = t.points[q][1];
        add(u + v, v, t.weights[q] * hI * hJ);
        add(v, u + v, t.weights[q] * hI * hJ);
      }
    } else {
      for (std::size_t i = 0; i < g.points.size(); ++i)
        for (std::size_t j = 0; j < g.points.size(); ++j)
          add(g.points[i], g.points[j], g.weights[i] * g.weights[j] * hI * hJ);
    }
    return m;
  };

  if (space == SpaceKind::pwc0) {
    Eigen::MatrixXd B(ne, ne);
    for (int i = 0; i < ne; ++i)
      for (int j = i; j < ne; ++j) B(i, j) = B(j, i) = moments(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]).sum();
    std::vector<int> labels(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) labels[static_cast<std::size_t>(e)] = e;
    return make_dense_operator(std::move(B), SpaceKind::pwc0, std::move(labels));
  }
  if (space != SpaceKind::cpl1) throw Error(ErrorCode::unsupported_configuration, "Green's operator supports pwc0 and cpl1");
  const PatchTable patches = build_patch_table(mesh);
  const auto n = static_cast<Eigen::Index>(patches.free_vertices.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < ne; ++i) {
    const Interval& I = cells[static_cast<std::size_t>(i)];
    const int ri[2] = {patches.free_index[static_cast<std::size_t>(I.left)], patches.free_index[static_cast<std::size_t>(I.right)]};
    for (int j = 0; j < ne; ++j) {
      const Interval& J = cells[static_cast<std::size_t>(j)];
      const int rj[2] = {patches.free_index[static_cast<std::size_t>(J.left)], patches.free_index[static_cast<std::size_t>(J.right)]};
      const Eigen::Matrix2d m = moments(I, J);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if (ri[a] >= 0 && rj[b] >= 0) B(ri[a], rj[b]) += m(a, b);
    }
  }
  return make_dense_operator(std::move(B), SpaceKind::cpl1, patches.free_vertices);
}

}  // namespace opcond
