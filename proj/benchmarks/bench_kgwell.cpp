#include "kgwell/assembly.hpp"
#include "kgwell/constants.hpp"
#include "kgwell/dynamics.hpp"
#include "kgwell/geometry.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace kgwell;

namespace {

Mesh square(Index n) { return build_rectangle_mesh({0, 0}, {1, 1}, n, n); }

Vector smooth(const Mesh& mesh, const DofMap& dofs, double phase) {
  Vector out(dofs.free_count());
  for (Index i = 0; i < out.size(); ++i) {
    const Point x = mesh.vertex(dofs.node_of_free[static_cast<std::size_t>(i)]);
    out[i] = std::sin(3.0 * x.x() + phase) * std::cos(2.0 * x.y());
  }
  return out;
}

}  // namespace

static void BM_AssembleOperators(benchmark::State& state) {
  const Mesh mesh = square(state.range(0));
  const BoundaryPartition p = classify_boundary(mesh, Point(-0.1, -0.1));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(mesh, p, DampingSpec::multiplier(p)));
  state.SetComplexityN(mesh.element_count());
}
BENCHMARK(BM_AssembleOperators)->RangeMultiplier(2)->Range(8, 64)->Complexity();

static void BM_CouplingVectors(benchmark::State& state) {
  const Mesh mesh = square(state.range(0));
  const BoundaryPartition p = classify_boundary(mesh, Point(-0.1, -0.1));
  const DofMap dofs = make_dof_map(mesh, p);
  const CouplingEvaluator ev(mesh, dofs, CouplingSpec::with_rho(1.0));
  const Vector u = smooth(mesh, dofs, 0.0), v = smooth(mesh, dofs, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ev.vectors(u, v));
  state.SetComplexityN(mesh.element_count());
}
BENCHMARK(BM_CouplingVectors)->RangeMultiplier(2)->Range(8, 64)->Complexity();

static void BM_MidpointStep(benchmark::State& state) {
  const Mesh mesh = square(state.range(0));
  const BoundaryPartition p = classify_boundary(mesh, Point(-0.1, -0.1));
  const DiscreteOperators ops = assemble_operators(mesh, p, DampingSpec::multiplier(p));
  StepOptions opts;
  opts.newton = state.range(1) != 0;
  const MidpointStepper stepper(mesh, ops, CouplingSpec::with_rho(1.0), 1e-2, opts);
  SimState s = SimState::zero(ops.size());
  s.u = 0.1 * smooth(mesh, ops.dofs, 0.0);
  s.v = 0.1 * smooth(mesh, ops.dofs, 1.0);
  for (auto _ : state) {
    s = stepper.advance(s).state;
    benchmark::DoNotOptimize(s.u.data());
  }
}
BENCHMARK(BM_MidpointStep)->ArgsProduct({{8, 16, 32}, {0, 1}})->ArgNames({"n", "newton"});

static void BM_FirstEigenpair(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(0.0, 1.0, state.range(0));
  const BoundaryPartition p = classify_boundary(mesh, Point::Zero());
  const DiscreteOperators ops = assemble_operators(mesh, p, DampingSpec::multiplier(p));
  for (auto _ : state) benchmark::DoNotOptimize(first_eigenpair(ops));
}
BENCHMARK(BM_FirstEigenpair)->Arg(200)->Arg(2000);

static void BM_EmbeddingConstant(benchmark::State& state) {
  const Mesh mesh = square(state.range(0));
  const BoundaryPartition p = classify_boundary(mesh, Point(-0.1, -0.1));
  const DiscreteOperators ops = assemble_operators(mesh, p, DampingSpec::multiplier(p));
  for (auto _ : state) benchmark::DoNotOptimize(embedding_constant(mesh, ops, 4.0));
}
BENCHMARK(BM_EmbeddingConstant)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
