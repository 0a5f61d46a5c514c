// Acceptance gate: one PASS/FAIL line per criterion, exit status = number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "opcond/assembly.hpp"
#include "opcond/duals.hpp"
#include "opcond/experiment.hpp"
#include "opcond/precond.hpp"
#include "opcond/spectral.hpp"

using namespace opcond;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct CrossCheck {
  std::string label;
  double lanczos = 0.0;
  double oracle = 0.0;
};

/// Lanczos-vs-dense and matrix-free-vs-dense comparisons gathered across all runs.
std::vector<CrossCheck> cross_checks;
std::vector<std::pair<std::string, double>> materialization_checks;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string join(const std::vector<double>& v, const char* f = "%.4g") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(f, v[i]);
  return out;
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

double oracle_kappa(const LinearOperator& G, const Eigen::MatrixXd& A) {
  const Eigen::VectorXd ev = dense_eig_oracle(G.dense(), A);
  return ev.maxCoeff() / ev.minCoeff();
}

/// Dense composition of the lowest-order preconditioner from its ingredients.
Eigen::MatrixXd dense_lowest_order(const SimplicialMesh& mesh, DualVariant variant, const Eigen::MatrixXd& B, double s,
                                   double beta1) {
  const Eigen::VectorXd D = coupling_diagonal(mesh, variant);
  const Eigen::VectorXd bubble = bubble_diagonal(D, mesh.dim(), s, beta1);
  const Eigen::MatrixXd Dinv = D.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd inner =
      variant == DualVariant::pwc ? Eigen::MatrixXd(Eigen::MatrixXd(patch_incidence(mesh)).transpose() * B * Eigen::MatrixXd(patch_incidence(mesh)))
                                  : B;
  return Dinv * (inner + Eigen::MatrixXd(bubble.asDiagonal())) * Dinv;
}

/// Compares the matrix-free preconditioners of one level with their dense composition.
void check_materialization(const std::string& label, const SimplicialMesh& mesh, const ExperimentConfig& c,
                           const LevelSystem& sys) {
  std::optional<DenseOperator> Bp, Bc;
  if (c.problem == Problem::cube_hypersingular) {
    SurfaceRequest r;
    r.single_layer_pwc = c.pwc;
    r.single_layer_cpl = c.cpl;
    SurfaceOperators ops = assemble_surface_operators(mesh, r, c.quadrature_settings());
    Bp = ops.single_layer_pwc;
    Bc = ops.single_layer_cpl;
  } else {
    const bool greens = c.problem == Problem::interval_laplace_s1;
    if (c.pwc) Bp = greens ? assemble_greens_1d(mesh, SpaceKind::pwc0) : assemble_single_layer_1d(mesh, SpaceKind::pwc0);
    if (c.cpl) Bc = greens ? assemble_greens_1d(mesh, SpaceKind::cpl1) : assemble_single_layer_1d(mesh, SpaceKind::cpl1);
  }
  auto lift = [&](const Eigen::MatrixXd& G1) -> Eigen::MatrixXd {
    if (c.ell == 1) return G1;
    const LagrangeSpace space(mesh, c.ell);
    const Eigen::MatrixXd q(linear_embedding(space));
    return q * G1 * q.transpose() + Eigen::MatrixXd(lagrange_node_diagonal(space, c.effective_s(), c.beta2).asDiagonal());
  };
  if (Bp && sys.G_pwc)
    materialization_checks.emplace_back(label + " G_pwc", rel_diff(sys.G_pwc->dense(), lift(dense_lowest_order(
                                                                                             mesh, DualVariant::pwc, Bp->values(), c.effective_s(), c.beta1_pwc))));
  if (Bc && sys.G_cpl)
    materialization_checks.emplace_back(label + " G_cpl", rel_diff(sys.G_cpl->dense(), lift(dense_lowest_order(
                                                                                             mesh, DualVariant::cpl, Bc->values(), c.effective_s(), c.beta1_cpl))));
}

/// Runs a configured experiment level by level, recording oracle cross-checks on small levels.
std::vector<TableRow> run_levels(const std::string& label, const ExperimentConfig& c, std::vector<SimplicialMesh> meshes,
                                 const std::function<void(const LevelSystem&, const TableRow&)>& extra = {}) {
  std::vector<TableRow> rows;
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    const LevelSystem sys = build_level_system(meshes[k], c);
    TableRow row = evaluate_level(sys, c, static_cast<int>(k) + 1);
    std::printf("  %s level %zu: dofs %zu kappa_A %.4g", label.c_str(), k + 1, row.dofs, row.kappa_A);
    if (row.kappa_jacobi) std::printf(" jacobi %.4g", *row.kappa_jacobi);
    if (row.kappa_pwc) std::printf(" pwc %.4g", *row.kappa_pwc);
    if (row.kappa_cpl) std::printf(" cpl %.4g", *row.kappa_cpl);
    if (row.dofs <= 2000) {
      const std::string lv = label + " level " + std::to_string(k + 1);
      const Eigen::MatrixXd A = sys.A.dense();
      cross_checks.push_back({lv + " kappa_A", row.kappa_A, oracle_kappa(LinearOperator::identity(A.rows()), A)});
      if (sys.jacobi) cross_checks.push_back({lv + " kappa_jacobi", *row.kappa_jacobi, oracle_kappa(*sys.jacobi, A)});
      if (sys.G_pwc) cross_checks.push_back({lv + " kappa_G_pwc", *row.kappa_pwc, oracle_kappa(*sys.G_pwc, A)});
      if (sys.G_cpl) cross_checks.push_back({lv + " kappa_G_cpl", *row.kappa_cpl, oracle_kappa(*sys.G_cpl, A)});
      if (row.dofs <= 200) check_materialization(lv, meshes[k], c, sys);
    }
    std::printf("\n");
    std::fflush(stdout);
    if (extra) extra(sys, row);
    rows.push_back(row);
  }
  return rows;
}

std::vector<TableRow> run_config(const std::string& label, const ExperimentConfig& c,
                                 const std::function<void(const LevelSystem&, const TableRow&)>& extra = {}) {
  c.validate();
  return run_levels(label, c, build_mesh_sequence(c), extra);
}

Outcome within(const std::vector<double>& got, const std::vector<double>& ref, double tol, const char* name) {
  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double dev = i < got.size() ? std::abs(got[i] / ref[i] - 1.0) : INFINITY;
    worst = std::max(worst, dev);
    if (!(dev <= tol)) o.pass = false;
  }
  o.detail = std::string(name) + " [" + join(got) + "] vs [" + join(ref) + "] max dev " + fmt("%.1f%%", 100 * worst);
  return o;
}

Outcome merge(const Outcome& a, const Outcome& b) { return {a.pass && b.pass, a.detail + "; " + b.detail}; }

/// Every level after the third stays within factor times the level-3 value.
Outcome bounded_after_level3(const std::vector<double>& k, double factor, const char* name) {
  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 3; i < k.size(); ++i) worst = std::max(worst, k[i] / k[2]);
  o.pass = k.size() >= 3 && worst <= factor;
  o.detail = std::string(name) + " [" + join(k) + "] max ratio to level 3 " + fmt("%.3f", worst);
  return o;
}

std::vector<double> column(const std::vector<TableRow>& rows, std::optional<double> TableRow::*member) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back((r.*member).value_or(NAN));
  return out;
}

std::vector<double> kappa_A(const std::vector<TableRow>& rows) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.kappa_A);
  return out;
}

ExperimentConfig cube_config(int ell, int levels) {
  ExperimentConfig c;
  c.problem = Problem::cube_hypersingular;
  c.ell = ell;
  c.levels = levels;
  return c;
}

// --- criteria -------------------------------------------------------------------------------

std::vector<TableRow> table1_rows;

Outcome criterion1() {
  table1_rows = run_config("cube ell=1", cube_config(1, 5));
  std::vector<double> dofs;
  for (const auto& r : table1_rows) dofs.push_back(static_cast<double>(r.dofs));
  Outcome o = within(dofs, {14, 50, 194, 770, 3074}, 0.0, "dofs");
  o = merge(o, within(column(table1_rows, &TableRow::kappa_pwc), {2.71, 2.36, 2.25, 2.30, 2.29}, 0.10, "pwc"));
  return merge(o, within(column(table1_rows, &TableRow::kappa_cpl), {2.64, 2.37, 2.26, 2.27, 2.27}, 0.10, "cpl"));
}

Outcome criterion2() {
  Outcome o;
  const std::vector<double> k = kappa_A(table1_rows);
  std::vector<double> growth;
  for (std::size_t i = 1; i < table1_rows.size(); ++i) {
    if (table1_rows[i - 1].dofs < 194) continue;
    growth.push_back(k[i] / k[i - 1]);
    if (!(growth.back() >= 1.8 && growth.back() <= 2.2)) o.pass = false;
  }
  if (growth.empty()) o.pass = false;
  o.detail = "kappa_A [" + join(k) + "] growth for dofs >= 194 [" + join(growth, "%.3f") + "]";
  return o;
}

Outcome criterion3() {
  ExperimentConfig c = cube_config(3, 4);
  c.cpl = false;
  const std::vector<TableRow> rows = run_config("cube ell=3", c);
  std::vector<double> dofs;
  for (const auto& r : rows) dofs.push_back(static_cast<double>(r.dofs));
  const std::vector<double> k = column(rows, &TableRow::kappa_pwc);
  Outcome o = merge(within(dofs, {56, 218, 866, 3458}, 0.0, "dofs"), within(k, {4.75, 5.18, 6.23, 6.55}, 0.15, "pwc"));
  const double plateau = k.size() == 4 ? std::abs(k[3] / k[2] - 1.0) : INFINITY;
  o.pass = o.pass && plateau <= 0.10;
  o.detail += "; last-two change " + fmt("%.1f%%", 100 * plateau);
  return o;
}

Outcome criterion4() {
  ExperimentConfig c = cube_config(1, 2);
  c.refinement = Refinement::corner_local;
  c.sweeps_per_level = 13;
  c.jacobi = true;
  c.validate();
  // Add levels until the smallest element reaches the target size.
  std::vector<SimplicialMesh> meshes = build_mesh_sequence(c);
  while (meshes.back().min_local_size() > 1e-10 && c.levels < 12) {
    ++c.levels;
    meshes = build_mesh_sequence(c);
  }
  const bool reached = meshes.back().min_local_size() <= 1e-10;
  const std::vector<TableRow> rows = run_levels("corner", c, std::move(meshes));
  const auto pwc = column(rows, &TableRow::kappa_pwc), cpl = column(rows, &TableRow::kappa_cpl);
  const auto jac = column(rows, &TableRow::kappa_jacobi);
  const double gmax = std::max(*std::max_element(pwc.begin(), pwc.end()), *std::max_element(cpl.begin(), cpl.end()));
  const double jmax = *std::max_element(jac.begin(), jac.end());
  Outcome o;
  o.pass = reached && gmax <= 2.6 && jmax >= 12.0;
  double gmax_refined = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) gmax_refined = std::max({gmax_refined, pwc[i], cpl[i]});
  o.detail = "levels " + std::to_string(rows.size()) + ", h_min " + fmt("%.1e", rows.back().h_min) + ", max G kappa " +
             fmt("%.4g", gmax) + " (refined levels only " + fmt("%.4g", gmax_refined) + "), max Jacobi kappa " + fmt("%.4g", jmax) + "; pwc [" + join(pwc) + "] cpl [" +
             join(cpl) + "] jacobi [" + join(jac) + "]";
  return o;
}

bool cell_has(const SimplicialMesh& m, int e, int v) {
  for (int w : m.cell_vertices(e))
    if (w == v) return true;
  return false;
}

Outcome criterion5() {
  std::mt19937_64 rng(42);
  double bio_pwc = 0.0, bio_cpl = 0.0, gram = 0.0, pou = 0.0;
  int overlaps = 0, meshes_1d = 0, meshes_2d = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SimplicialMesh mesh;
    if (trial % 2 == 0) {
      // Non-uniform interval whose neighbour ratios stay below 2 (K-mesh).
      std::uniform_int_distribution<int> n_dist(5, 40);
      std::uniform_int_distribution<int> g_dist(0, 3);
      std::uniform_real_distribution<double> factor(0.6, 1.6);
      const int n = n_dist(rng);
      std::vector<double> lengths = {1.0};
      for (int k = 1; k < n; ++k) lengths.push_back(std::clamp(lengths.back() * factor(rng), 0.55 * lengths.back(), 1.8 * lengths.back()));
      double total = 0.0;
      for (double l : lengths) total += l;
      std::vector<double> points = {0.0};
      for (int k = 0; k + 1 < n; ++k) points.push_back(points.back() + lengths[static_cast<std::size_t>(k)] / total);
      points.push_back(1.0);
      mesh = build_interval_mesh(points, static_cast<GammaSpec>(g_dist(rng)));
      ++meshes_1d;
    } else {
      mesh = refine_uniform_bisection(build_cube_surface_mesh());
      std::uniform_int_distribution<int> rounds(1, 3);
      std::bernoulli_distribution pick(0.3);
      for (int r = rounds(rng); r > 0; --r) {
        std::vector<int> marked;
        for (int e = 0; e < static_cast<int>(mesh.num_cells()); ++e)
          if (pick(rng)) marked.push_back(e);
        mesh = refine_nvb_conforming(mesh, marked);
      }
      ++meshes_2d;
    }
    const PatchTable patches = build_patch_table(mesh);
    const double inv = 1.0 / (mesh.dim() + 1);

    const DualOracle pwc = dual_oracle_pwc(mesh);
    const DualOracle cpl = dual_oracle_cpl(mesh);
    for (std::size_t i = 0; i < pwc.free_vertices.size(); ++i) {
      const int v = pwc.free_vertices[i];
      const double omega = patches.patch_volume[static_cast<std::size_t>(v)];
      for (int w : pwc.free_vertices) {
        const double a = pair_with_hat(pwc.psi_mesh(), pwc.psi[i], mesh, w);
        bio_pwc = std::max(bio_pwc, std::abs(a - (v == w ? omega : 0.0)) / omega);
        const double b = hat_product(mesh, v, w) + pair_with_hat(cpl.twice, cpl.theta[i], mesh, w);
        bio_cpl = std::max(bio_cpl, std::abs(b - (v == w ? inv * omega : 0.0)) / omega);
      }
    }
    // Bubble element Gram matrix (1/4)|T|^{-1} <theta_v, theta_w>_T of the single-refinement construction.
    if (mesh.dim() == 2) {
      const double diag = std::ldexp(1.0, mesh.dim()) - 1.0;
      for (int T = 0; T < static_cast<int>(mesh.num_cells()); ++T)
        for (std::size_t i = 0; i < pwc.free_vertices.size(); ++i) {
          if (!cell_has(mesh, T, pwc.free_vertices[i])) continue;
          for (std::size_t j = 0; j < pwc.free_vertices.size(); ++j) {
            if (!cell_has(mesh, T, pwc.free_vertices[j])) continue;
            const double g = l2_product(pwc.once, pwc.theta[i], pwc.theta[j], T) / (4.0 * mesh.volume(T));
            gram = std::max(gram, std::abs(g - (i == j ? diag : -1.0)));
          }
        }
    }
    std::set<int> seen;
    for (const auto& theta : cpl.theta)
      for (const auto& [f, value] : theta)
        if (!seen.insert(f).second) ++overlaps;
    std::vector<double> sum(cpl.once.fine.num_cells(), 0.0);
    for (const auto& phi : cpl.phi_tilde)
      for (const auto& [f, value] : phi) sum[static_cast<std::size_t>(f)] += value;
    for (double x : sum) pou = std::max(pou, std::abs(x - 1.0));
  }
  Outcome o;
  o.pass = bio_pwc <= 1e-12 && bio_cpl <= 1e-12 && gram <= 1e-12 && overlaps == 0 && pou <= 1e-12;
  o.detail = std::to_string(meshes_1d) + " interval + " + std::to_string(meshes_2d) + " cube meshes; pwc biorth " +
             fmt("%.1e", bio_pwc) + ", cpl biorth " + fmt("%.1e", bio_cpl) + ", bubble Gram " + fmt("%.1e", gram) +
             ", theta overlaps " + std::to_string(overlaps) + ", sum phi~ - 1 " + fmt("%.1e", pou);
  return o;
}

Outcome criterion6() {
  ExperimentConfig c;
  c.problem = Problem::interval_hypersingular;
  c.levels = 6;
  c.elements = 128;
  std::vector<int> it_pwc, it_cpl;
  const auto rows = run_config("interval hypersingular", c, [&](const LevelSystem& sys, const TableRow&) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd b(sys.A.dim());
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = u(rng);
    it_pwc.push_back(pcg_solve(sys.A, *sys.G_pwc, b, 1e-8, 1000).iterations);
    it_cpl.push_back(pcg_solve(sys.A, *sys.G_cpl, b, 1e-8, 1000).iterations);
  });
  const std::vector<double> kA = kappa_A(rows);
  Outcome o = merge(bounded_after_level3(column(rows, &TableRow::kappa_pwc), 1.3, "pwc"),
                    bounded_after_level3(column(rows, &TableRow::kappa_cpl), 1.3, "cpl"));
  std::vector<double> growth;
  for (std::size_t i = 1; i < kA.size(); ++i) growth.push_back(kA[i] / kA[i - 1]);
  const bool grows = std::all_of(growth.begin(), growth.end(), [](double g) { return g >= 1.8; });
  auto spread = [](const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()); };
  auto ints = [](const std::vector<int>& v) { return std::vector<double>(v.begin(), v.end()); };
  o.pass = o.pass && grows && spread(it_pwc) <= 2 && spread(it_cpl) <= 2;
  o.detail += "; kappa_A growth [" + join(growth, "%.3f") + "]; PCG iterations pwc [" + join(ints(it_pwc)) + "] cpl [" +
              join(ints(it_cpl)) + "]";
  return o;
}

Outcome criterion7() {
  ExperimentConfig c;
  c.problem = Problem::interval_laplace_s1;
  c.levels = 5;
  c.elements = 16;
  const auto rows = run_config("interval laplace", c);
  return merge(bounded_after_level3(column(rows, &TableRow::kappa_pwc), 1.3, "pwc"),
               bounded_after_level3(column(rows, &TableRow::kappa_cpl), 1.3, "cpl"));
}

Outcome criterion8() {
  Outcome o;
  double worst_kappa = 0.0, worst_dense = 0.0;
  std::string worst_label;
  for (const auto& c : cross_checks) {
    const double dev = std::abs(c.lanczos / c.oracle - 1.0);
    if (dev > worst_kappa) {
      worst_kappa = dev;
      worst_label = c.label;
    }
    if (!(dev <= 0.01)) {
      o.pass = false;
      std::printf("  cross-check miss: %s lanczos %.6g oracle %.6g\n", c.label.c_str(), c.lanczos, c.oracle);
    }
  }
  for (const auto& [label, d] : materialization_checks) {
    worst_dense = std::max(worst_dense, d);
    if (!(d <= 1e-12)) o.pass = false;
  }
  if (cross_checks.empty() || materialization_checks.empty()) o.pass = false;
  o.detail = std::to_string(cross_checks.size()) + " kappa comparisons, max deviation " + fmt("%.2e", worst_kappa) +
             " (" + worst_label + "); " + std::to_string(materialization_checks.size()) +
             " matrix-free vs dense comparisons, max relative difference " + fmt("%.1e", worst_dense);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "cube ell=1 preconditioned condition numbers", criterion1},
      {2, "cube ell=1 unpreconditioned growth", criterion2},
      {3, "cube ell=3 preconditioned condition numbers", criterion3},
      {4, "corner-local refinement", criterion4},
      {5, "dual basis oracle suite", criterion5},
      {6, "interval hypersingular properties", criterion6},
      {7, "interval laplace s=1 boundedness", criterion7},
      {8, "oracle cross-validation", criterion8},
  };
  std::vector<std::string> lines;
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    char head[160];
    std::snprintf(head, sizeof head, "criterion %d (%s): %s [%.0f s] ", c.id, c.name, o.pass ? "PASS" : "FAIL", secs);
    lines.push_back(head + o.detail);
    std::printf("%s\n", lines.back().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("\nsummary\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
