// Timings for the stages of one refinement level: weak operators, assembly, solve.

#include "polystokes/assembly.hpp"
#include "polystokes/problem.hpp"
#include "polystokes/study.hpp"

#include <benchmark/benchmark.h>

namespace ps = polystokes;

namespace {

const char* family_name(int f) {
  static const char* names[] = {"triangular", "polygonal", "tetrahedral"};
  return names[f];
}

const char* problem_for(int f) { return f == 2 ? "ex3" : "ex1"; }

void BM_WeakOperators(benchmark::State& state) {
  const auto mesh = ps::make_mesh(family_name(state.range(0)), state.range(1));
  const int k = static_cast<int>(state.range(2));
  for (auto _ : state) {
    ps::Discretization disc(mesh, k);
    benchmark::DoNotOptimize(disc.n_elements());
  }
  state.counters["elements"] = mesh.n_elements();
}

void BM_Assemble(benchmark::State& state) {
  const auto mesh = ps::make_mesh(family_name(state.range(0)), state.range(1));
  const ps::Discretization disc(mesh, static_cast<int>(state.range(2)));
  const ps::ProblemData pd = ps::builtin_problem(problem_for(state.range(0)));
  for (auto _ : state) {
    auto sys = ps::assemble(disc, pd);
    benchmark::DoNotOptimize(sys.A.nonZeros());
  }
  state.counters["ndof_u"] = disc.dofs().n_velocity();
}

void BM_Solve(benchmark::State& state) {
  const auto mesh = ps::make_mesh(family_name(state.range(0)), state.range(1));
  const ps::Discretization disc(mesh, static_cast<int>(state.range(2)));
  const ps::SaddleSystem sys = ps::assemble(disc, ps::builtin_problem(problem_for(state.range(0))));
  ps::SolverConfig config;
  config.method = state.range(3) ? ps::SolverMethod::schur : ps::SolverMethod::direct;
  for (auto _ : state) {
    auto sol = ps::solve(sys, config);
    benchmark::DoNotOptimize(sol.u.data());
  }
  state.counters["unknowns"] = disc.dofs().n_velocity() + disc.dofs().n_pressure();
}

// Arguments: family (0 triangular, 1 polygonal, 2 tetrahedral), level, k.
BENCHMARK(BM_WeakOperators)->Args({0, 5, 2})->Args({1, 5, 2})->Args({2, 2, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Assemble)->Args({0, 5, 2})->Args({1, 5, 2})->Args({2, 2, 2})->Unit(benchmark::kMillisecond);
// Last argument: 0 direct, 1 block Schur.
BENCHMARK(BM_Solve)
    ->Args({0, 5, 2, 0})
    ->Args({0, 5, 2, 1})
    ->Args({1, 5, 2, 0})
    ->Args({1, 5, 2, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
