#include <benchmark/benchmark.h>

#include <cmath>

#include "igp/fem.hpp"
#include "igp/sparse.hpp"

namespace {

// The system M + h d S of one diffusion stage, with a smooth right-hand side.
struct StageSystem {
  igp::CsrMatrix a;
  std::vector<double> b;
};

StageSystem make_system(std::size_t n) {
  const igp::TriMesh mesh = igp::build_rect_mesh(n, n);
  const igp::AssembledOperators ops = igp::assemble_operators(mesh);
  const auto f = igp::interpolate(mesh, [](double x, double y) { return std::cos(3.0 * x) * std::sin(2.0 * y); });
  return {igp::CsrMatrix::combine(1.0, ops.mass, 5e-4, ops.stiffness), igp::matvec(ops.mass, f)};
}

void BM_SolveCg(benchmark::State& state) {
  const StageSystem sys = make_system(static_cast<std::size_t>(state.range(0)));
  std::size_t iterations = 0;
  for (auto _ : state) {
    const igp::SolveResult r = igp::solve_cg(sys.a, sys.b);
    iterations = r.report.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["cg_iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_SolveCg)->RangeMultiplier(2)->Range(16, 128);

void BM_SolveBicgstab(benchmark::State& state) {
  const StageSystem sys = make_system(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(igp::solve_bicgstab(sys.a, sys.b).x.data());
}
BENCHMARK(BM_SolveBicgstab)->RangeMultiplier(2)->Range(16, 128);

void BM_Matvec(benchmark::State& state) {
  const StageSystem sys = make_system(static_cast<std::size_t>(state.range(0)));
  std::vector<double> y(sys.b.size());
  for (auto _ : state) {
    igp::matvec(sys.a, sys.b, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<benchmark::IterationCount>(sys.a.nnz()));
}
BENCHMARK(BM_Matvec)->RangeMultiplier(2)->Range(16, 128);

}  // namespace
