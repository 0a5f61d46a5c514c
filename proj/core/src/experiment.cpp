#include <chrono>
#include <cmath>

#include "opcond/duals.hpp"
#include "opcond/error.hpp"
#include "opcond/experiment.hpp"
#include "opcond/precond.hpp"

namespace opcond {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Point> cube_corners() {
  std::vector<Point> out;
  for (int x = 0; x <= 1; ++x)
    for (int y = 0; y <= 1; ++y)
      for (int z = 0; z <= 1; ++z) out.push_back({double(x), double(y), double(z)});
  return out;
}

SimplicialMesh corner_sweeps(SimplicialMesh mesh, int sweeps) {
  const auto corners = cube_corners();
  for (int k = 0; k < sweeps; ++k) mesh = refine_nvb_conforming(mesh, cells_touching(mesh, corners));
  return mesh;
}

SimplicialMesh bisections(SimplicialMesh mesh, int times) {
  for (int k = 0; k < times; ++k) mesh = refine_uniform_bisection(mesh);
  return mesh;
}

/// G for the lowest-order space from an opposite-order matrix on pwc0 or cpl1.
LinearOperator lowest_order_preconditioner(const SimplicialMesh& mesh, DualVariant variant, const DenseOperator& B_U,
                                           double s, double beta1) {
  const Eigen::VectorXd D = coupling_diagonal(mesh, variant);
  const Eigen::VectorXd bubble = bubble_diagonal(D, mesh.dim(), s, beta1);
  if (variant == DualVariant::pwc) return make_pwc_preconditioner(D, patch_incidence(mesh), B_U, bubble);
  return make_cpl_preconditioner(D, B_U, bubble);
}

}  // namespace

std::vector<SimplicialMesh> build_mesh_sequence(const ExperimentConfig& config) {
  std::vector<SimplicialMesh> meshes;
  meshes.reserve(static_cast<std::size_t>(config.levels));
  if (config.problem == Problem::cube_hypersingular) {
    if (config.refinement == Refinement::corner_local) {
      meshes.push_back(build_cube_surface_mesh());
      for (int k = 1; k < config.levels; ++k) meshes.push_back(corner_sweeps(meshes.back(), config.sweeps_per_level));
    } else {
      meshes.push_back(bisections(build_cube_surface_mesh(), config.effective_initial_bisections()));
      for (int k = 1; k < config.levels; ++k) meshes.push_back(bisections(meshes.back(), config.bisections_per_level));
    }
  } else {
    for (int k = 0; k < config.levels; ++k)
      meshes.push_back(build_interval_mesh(static_cast<std::size_t>(config.elements) << k, GammaSpec::both));
  }
  return meshes;
}

LevelSystem build_level_system(const SimplicialMesh& mesh, const ExperimentConfig& config) {
  LevelSystem sys;
  const double s = config.effective_s();
  const int ell = config.ell;
  std::optional<DenseOperator> B_pwc, B_cpl;
  auto start = Clock::now();

  if (config.problem == Problem::cube_hypersingular) {
    SurfaceRequest request;
    request.single_layer_pwc = config.pwc;
    request.single_layer_cpl = config.cpl;
    request.hypersingular = true;
    request.hypersingular_degree = ell;
    request.alpha = config.alpha;
    SurfaceOperators ops = assemble_surface_operators(mesh, request, config.quadrature_settings());
    const HypersingularOperator& H = *ops.hypersingular;
    sys.A = LinearOperator::rank_one_update(H.tilde.matrix, H.moments, H.alpha);
    if (config.jacobi) sys.jacobi = make_jacobi_preconditioner(H.diagonal());
    B_pwc = ops.single_layer_pwc;
    B_cpl = ops.single_layer_cpl;
  } else {
    DenseOperator A = config.problem == Problem::interval_hypersingular ? assemble_hypersingular_1d(mesh)
                                                                         : assemble_stiffness(mesh, ell);
    sys.A = LinearOperator::from_dense(A.matrix, true, true);
    if (config.jacobi) sys.jacobi = make_jacobi_preconditioner(A.values().diagonal());
    const bool greens = config.problem == Problem::interval_laplace_s1;
    if (config.pwc)
      B_pwc = greens ? assemble_greens_1d(mesh, SpaceKind::pwc0) : assemble_single_layer_1d(mesh, SpaceKind::pwc0);
    if (config.cpl)
      B_cpl = greens ? assemble_greens_1d(mesh, SpaceKind::cpl1) : assemble_single_layer_1d(mesh, SpaceKind::cpl1);
  }
  sys.assembly_seconds = seconds_since(start);
  sys.dofs = static_cast<std::size_t>(sys.A.dim());
  sys.h_min = mesh.min_local_size();

  start = Clock::now();
  std::optional<LagrangeSpace> space;
  SparseMatrix q;
  Eigen::VectorXd G2;
  if (ell > 1) {
    space.emplace(mesh, ell);
    q = linear_embedding(*space);
    G2 = lagrange_node_diagonal(*space, s, config.beta2);
  }
  auto lift = [&](LinearOperator G1) { return ell > 1 ? make_higher_order_preconditioner(q, G1, G2) : G1; };
  if (B_pwc) sys.G_pwc = lift(lowest_order_preconditioner(mesh, DualVariant::pwc, *B_pwc, s, config.beta1_pwc));
  if (B_cpl) sys.G_cpl = lift(lowest_order_preconditioner(mesh, DualVariant::cpl, *B_cpl, s, config.beta1_cpl));
  sys.precond_seconds = seconds_since(start);
  return sys;
}

TableRow evaluate_level(const LevelSystem& sys, const ExperimentConfig& config, int level) {
  TableRow row;
  row.level = level;
  row.dofs = sys.dofs;
  row.h_min = sys.h_min;
  row.assembly_seconds = sys.assembly_seconds;
  row.precond_seconds = sys.precond_seconds;
  const auto start = Clock::now();
  const LanczosOptions options = config.lanczos_options();
  auto kappa = [&](const LinearOperator& G, const char* column) {
    const SpectralReport r = lanczos_condition(G, sys.A, options);
    if (!r.converged) row.unconverged.emplace_back(column);
    return r.kappa;
  };
  row.kappa_A = kappa(LinearOperator::identity(sys.A.dim()), "kappa_A");
  if (sys.jacobi) row.kappa_jacobi = kappa(*sys.jacobi, "kappa_jacobi");
  if (sys.G_pwc) row.kappa_pwc = kappa(*sys.G_pwc, "kappa_G_pwc");
  if (sys.G_cpl) row.kappa_cpl = kappa(*sys.G_cpl, "kappa_G_cpl");
  row.lanczos_seconds = seconds_since(start);
  return row;
}

std::vector<TableRow> run_experiment(const ExperimentConfig& config,
                                     const std::function<void(const TableRow&)>& on_row) {
  config.validate();
  std::vector<TableRow> rows;
  const std::vector<SimplicialMesh> meshes = build_mesh_sequence(config);
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    try {
      rows.push_back(evaluate_level(build_level_system(meshes[k], config), config, static_cast<int>(k) + 1));
      if (on_row) on_row(rows.back());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw Error(e.code(), "level " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace opcond
