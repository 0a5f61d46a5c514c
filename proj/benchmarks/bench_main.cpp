#include <benchmark/benchmark.h>

#include "opcond/assembly.hpp"
#include "opcond/duals.hpp"
#include "opcond/precond.hpp"
#include "opcond/spectral.hpp"

using namespace opcond;

namespace {

SimplicialMesh cube(int bisections) {
  SimplicialMesh m = build_cube_surface_mesh();
  for (int k = 0; k < bisections; ++k) m = refine_uniform_bisection(m);
  return m;
}

void BM_SurfaceSweep(benchmark::State& state) {
  const SimplicialMesh m = cube(static_cast<int>(state.range(0)));
  SurfaceRequest r;
  r.single_layer_pwc = r.single_layer_cpl = r.hypersingular = true;
  for (auto _ : state) benchmark::DoNotOptimize(assemble_surface_operators(m, r));
  state.counters["cells"] = static_cast<double>(m.num_cells());
}
BENCHMARK(BM_SurfaceSweep)->Arg(1)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_PwcApply(benchmark::State& state) {
  const SimplicialMesh m = cube(static_cast<int>(state.range(0)));
  const DenseOperator B = assemble_single_layer_3d(m, SpaceKind::pwc0);
  const Eigen::VectorXd D = coupling_diagonal(m, DualVariant::pwc);
  const LinearOperator G = make_pwc_preconditioner(D, patch_incidence(m), B, bubble_diagonal(D, 2, 0.5, 0.65));
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(G.dim());
  for (auto _ : state) benchmark::DoNotOptimize(G.apply(x));
  state.counters["dofs"] = static_cast<double>(G.dim());
}
BENCHMARK(BM_PwcApply)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_Lanczos(benchmark::State& state) {
  const SimplicialMesh m = build_interval_mesh(static_cast<std::size_t>(state.range(0)), GammaSpec::both);
  const LinearOperator A = LinearOperator::from_dense(assemble_hypersingular_1d(m).values());
  const DenseOperator B = assemble_single_layer_1d(m, SpaceKind::pwc0);
  const Eigen::VectorXd D = coupling_diagonal(m, DualVariant::pwc);
  const LinearOperator G = make_pwc_preconditioner(D, patch_incidence(m), B, bubble_diagonal(D, 1, 0.5, 0.65));
  for (auto _ : state) benchmark::DoNotOptimize(lanczos_condition(G, A));
}
BENCHMARK(BM_Lanczos)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
