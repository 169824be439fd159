#pragma once

#include <map>
#include <vector>

#include "ctapf/tcbs.hpp"

namespace ctapf {

// Chained allocation in linked-list form: each agent knows its first task,
// each task knows its follow-up, matching how the greedy round builds them.
struct AssignmentPlan {
  std::map<int, int> agent_task;   // agent -> first task of its chain
  std::map<int, int> consecutive;  // task -> task served right after it
  std::vector<std::vector<int>> flatten(int n_agents) const;
};

// Repeatedly hands the globally nearest open task to the nearest service
// pose. Poses are the agents still without work, plus current chain tails
// whenever there are more open tasks than idle agents. Distances are exact
// shortest paths; ties fall to the earlier pose, then the lower task id.
// Throws InfeasibleError when no remaining pose can reach any open task.
AssignmentPlan greedy_assign(const Problem& problem);

// Collision-blind cost of fixed chains: every agent walks exact shortest
// paths through its list, and each delivery contributes its absolute time.
// Throws UnreachableError when some leg has no route.
long relaxed_plan_cost(const Problem& problem,
                       const std::vector<std::vector<int>>& chains,
                       DistanceMemo& memo);

struct DecoupledConfig {
  long enumeration_budget = 10'000'000;  // orderings allowed before giving up
};

// Exhausts every way to split the tasks over the agents and order each
// share, scoring them collision-blind, and returns the cheapest chains
// (lexicographically smallest on ties). The allocation is settled here,
// before any interaction between agents is considered; routing comes after.
// Throws BudgetError when the enumeration would be too large.
std::vector<std::vector<int>> decoupled_assign(const Problem& problem,
                                               const DecoupledConfig& config = {});

// Conflict resolution with the allocation frozen: runs the joint search on a
// copy of the problem whose chains are preset, leaving only constraint
// branching.
SolveResult cbs_solve(const Problem& problem,
                      const std::vector<std::vector<int>>& assignments,
                      SolverConfig config = {});

// Greedy allocation realized into collision-free paths.
SolveResult solve_greedy(const Problem& problem, SolverConfig config = {});

// Decoupled allocate-then-route pipeline realized into collision-free paths.
SolveResult solve_decoupled(const Problem& problem, SolverConfig config = {},
                            DecoupledConfig dconfig = {});

}  // namespace ctapf
