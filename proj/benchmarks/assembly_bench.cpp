#include <benchmark/benchmark.h>

#include "igp/fem.hpp"

namespace {

void BM_AssembleOperators(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const igp::TriMesh mesh = igp::build_rect_mesh(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(igp::assemble_operators(mesh));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(mesh.num_nodes()));
}
BENCHMARK(BM_AssembleOperators)->RangeMultiplier(2)->Range(16, 128)->Complexity(benchmark::oN);

void BM_AssembleTaxis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const igp::TriMesh mesh = igp::build_rect_mesh(n, n);
  const igp::AssembledOperators ops = igp::assemble_operators(mesh);
  const auto chi = igp::interpolate(mesh, [](double x, double y) { return 1.0 + x * y; });
  const auto s = igp::interpolate(mesh, [](double x, double y) { return x * x + y; });
  for (auto _ : state) benchmark::DoNotOptimize(igp::assemble_taxis(mesh, ops.geometry, chi, s));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(mesh.num_nodes()));
}
BENCHMARK(BM_AssembleTaxis)->RangeMultiplier(2)->Range(16, 128)->Complexity(benchmark::oN);

}  // namespace
