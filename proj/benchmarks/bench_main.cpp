#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "llb/fem.hpp"
#include "llb/linalg.hpp"
#include "llb/schemes.hpp"

using namespace llb;

namespace {

NodalField smooth_field(const Mesh& mesh) {
  NodalField f(mesh);
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const auto& x = mesh.vertices()[i];
    f.set(i, {std::sin(3.0 * x[0]), std::cos(2.0 * x[1]), x[0] * x[1]});
  }
  return f;
}

LlbParams unit_params() {
  LlbParams p;
  p.beta1 = 1.0;
  p.beta2 = 0.1;
  p.lambda = 0.1;
  return p;
}

void BM_Spmv(benchmark::State& state) {
  const FeSpace space(build_structured(static_cast<std::size_t>(state.range(0))));
  const CsrMatrix a = kron_identity3(space.ops().stiffness);
  const std::vector<double> x = smooth_field(space.mesh()).raw();
  for (auto _ : state) benchmark::DoNotOptimize(spmv(a, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}
BENCHMARK(BM_Spmv)->Arg(32)->Arg(64)->Arg(128);

void BM_AssembleLinearScheme(benchmark::State& state) {
  const FeSpace space(build_structured(static_cast<std::size_t>(state.range(0))));
  const NodalField phi = smooth_field(space.mesh());
  const LlbParams p = unit_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_linear_scheme_matrix(space, p, phi, CurrentField::bump(4.0), 0.0, 1e-3));
  }
}
BENCHMARK(BM_AssembleLinearScheme)->Arg(16)->Arg(32)->Arg(64);

void BM_MassSolveCg(benchmark::State& state) {
  const FeSpace space(build_structured(static_cast<std::size_t>(state.range(0))));
  const std::vector<double> b = space.ops().lumped_mass;
  for (auto _ : state) benchmark::DoNotOptimize(solve_cg(space.ops().mass, b, {1e-12, 20000, Preconditioner::jacobi}));
}
BENCHMARK(BM_MassSolveCg)->Arg(32)->Arg(64)->Arg(128);

void BM_LinearStep(benchmark::State& state) {
  const FeSpace space(build_structured(static_cast<std::size_t>(state.range(0))));
  const LlbParams p = unit_params();
  StepperState s;
  s.u = smooth_field(space.mesh());
  const StepOptions options;
  for (auto _ : state) benchmark::DoNotOptimize(linear_step(s, space, p, CurrentField::bump(4.0), 1e-3, options));
}
BENCHMARK(BM_LinearStep)->Arg(16)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
