#pragma once

#include <vector>

#include "ctapf/problem.hpp"

namespace ctapf {

struct OracleConfig {
  // Upper bound on the joint state space (free cells ^ agents x statuses ^
  // tasks) accepted before searching, and on states popped while searching.
  long state_space_budget = 20'000'000;
  long max_expansions = 20'000'000;
};

struct OracleResult {
  Solution solution;
  std::vector<std::vector<int>> assignments;  // realized task order per agent
  long expanded = 0;
};

// Exact reference solver: uniform-cost search over the joint configuration of
// all agents and task statuses. Agents move simultaneously one cell per step
// (or wait); vertex and swap collisions are excluded; an idle agent standing
// on the start cell of a pending task always begins it, and a carried task
// completes on its goal cell. Cost accumulates one unit per unfinished task
// per step, which equals the sum of task completion times.
//
// Scales to a couple of agents and tasks on small maps; everything here is
// deliberately independent of the tree-search solvers.
OracleResult brute_force_solve(const Problem& problem, const OracleConfig& config = {});

}  // namespace ctapf
