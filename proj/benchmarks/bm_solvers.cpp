// Microbenchmarks for the planner layers: low-level path queries, full solves
// of each solver on seeded random instances, and the exhaustive reference.

#include <benchmark/benchmark.h>

#include "ctapf/baselines.hpp"
#include "ctapf/oracle.hpp"
#include "ctapf/scenario.hpp"
#include "ctapf/tcbs.hpp"

namespace {

using namespace ctapf;

Problem instance(uint64_t seed, int m_tasks, int size = 8) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.width = size;
  spec.height = size;
  spec.obstacle_density = 0.2;
  spec.n_agents = 3;
  spec.m_tasks = m_tasks;
  return gen_scenario(spec);
}

void BM_SpacetimePlan(benchmark::State& state) {
  Problem p = instance(11, 2);
  for (auto _ : state) {
    DistanceMemo memo(p.map);
    SpacetimePlanner planner(p.map, memo);
    std::vector<Cell> waypoints{p.tasks[0].start, p.tasks[0].goal,
                                p.tasks[1].start, p.tasks[1].goal};
    benchmark::DoNotOptimize(planner.plan(p.agent_starts[0], waypoints, {}));
  }
}
BENCHMARK(BM_SpacetimePlan);

void BM_DistanceMemoSweep(benchmark::State& state) {
  Problem p = instance(11, 2);
  for (auto _ : state) {
    DistanceMemo memo(p.map);
    benchmark::DoNotOptimize(memo.exact(p.agent_starts[0], p.tasks[1].goal));
  }
}
BENCHMARK(BM_DistanceMemoSweep);

void BM_Tcbs(benchmark::State& state) {
  Problem p = instance(uint64_t(7 + state.range(0)), int(state.range(0)));
  for (auto _ : state) {
    TcbsSolver solver(p);
    benchmark::DoNotOptimize(solver.solve());
  }
}
BENCHMARK(BM_Tcbs)->Arg(2)->Arg(3);

void BM_TcbsNN2(benchmark::State& state) {
  Problem p = instance(uint64_t(7 + state.range(0)), int(state.range(0)));
  SolverConfig config;
  config.mode = SearchMode::NearestNeighbor;
  for (auto _ : state) {
    TcbsSolver solver(p, config);
    benchmark::DoNotOptimize(solver.solve());
  }
}
BENCHMARK(BM_TcbsNN2)->Arg(2)->Arg(3);

void BM_Greedy(benchmark::State& state) {
  Problem p = instance(uint64_t(7 + state.range(0)), int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_greedy(p));
  }
}
BENCHMARK(BM_Greedy)->Arg(2)->Arg(3)->Arg(4);

void BM_Decoupled(benchmark::State& state) {
  Problem p = instance(uint64_t(7 + state.range(0)), int(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_decoupled(p));
  }
}
BENCHMARK(BM_Decoupled)->Arg(2)->Arg(3);

void BM_Oracle(benchmark::State& state) {
  Problem p = instance(21, 2, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_solve(p));
  }
}
BENCHMARK(BM_Oracle);

}  // namespace

BENCHMARK_MAIN();
