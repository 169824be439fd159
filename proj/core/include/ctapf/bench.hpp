#pragma once

#include <string>
#include <vector>

#include "ctapf/scenario.hpp"

namespace ctapf {

// One benchmark cell: a solver on a scenario. Blank numeric fields (a solver
// that timed out has no cost; an instance whose reference solve failed has no
// optimum) stay empty in the CSV; the two flags say which halves are filled.
struct BenchRecord {
  std::string scenario_id;
  std::string solver;
  int m_tasks = 0;
  long total_cost = 0;
  long optimal_cost = 0;
  long regret_total = 0;
  double regret_per_task = 0.0;
  double planning_ms = 0.0;
  long nodes_expanded = 0;
  std::string status = "ok";  // ok | timeout | infeasible | error

  bool has_cost = false;       // total_cost is meaningful
  bool has_reference = false;  // optimal_cost (and regret, when both) meaningful
};

// CSV with a fixed header; columns are exactly the record fields above, in
// that order. Rows parse back losslessly.
std::string records_to_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> records_from_csv(const std::string& text);

struct BenchConfig {
  std::vector<std::string> solvers = {"tcbs", "tcbs-nn2", "greedy", "decoupled"};
  double time_limit_s = 60.0;
  long node_budget = 2'000'000;
  long oracle_state_budget = 20'000'000;  // exhaustive reference allowed below this
  int jobs = 1;
};

struct BenchResult {
  std::vector<BenchRecord> records;     // one per (scenario, solver), in order
  std::vector<std::string> flags;       // anything worth a human's attention
};

// Runs every configured solver on every scenario. The optimal reference per
// scenario is the optimal tree search; the exhaustive joint-state search runs
// alongside it when the instance is small enough and stands in as the
// reference when the tree search fails, and when both are available and
// disagree, the instance is flagged rather than silently absorbed. Every
// ok cell's solution is re-checked by the validator before it is reported.
// Solver wall time alone is measured. With jobs > 1, scenarios run in
// parallel; record order and cost columns are unaffected.
BenchResult run_benchmark(const std::vector<ScenarioSpec>& specs,
                          const BenchConfig& config = {});

// Mean/median regret and planning time per (solver, m_tasks), as a small
// fixed-width text table over the ok rows.
std::string summarize(const std::vector<BenchRecord>& records);

}  // namespace ctapf
