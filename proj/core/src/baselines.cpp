#include "ctapf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctapf/errors.hpp"

namespace ctapf {

namespace {

void require_open_problem(const Problem& problem, const char* who) {
  if (!problem.initial_assignments.empty()) {
    std::ostringstream ss;
    ss << who << " decides the allocation itself; the problem already has one";
    throw DomainError(ss.str());
  }
}

}  // namespace

std::vector<std::vector<int>> AssignmentPlan::flatten(int n_agents) const {
  std::vector<std::vector<int>> chains(n_agents);
  for (const auto& [agent, first] : agent_task) {
    int task = first;
    chains[agent].push_back(task);
    auto next = consecutive.find(task);
    while (next != consecutive.end()) {
      task = next->second;
      chains[agent].push_back(task);
      next = consecutive.find(task);
    }
  }
  return chains;
}

AssignmentPlan greedy_assign(const Problem& problem) {
  validate_problem(problem);
  require_open_problem(problem, "greedy allocation");

  DistanceMemo memo(problem.map);
  auto distance = [&](const Cell& from, const Cell& to) -> int {
    try {
      return memo.exact(from, to);
    } catch (const UnreachableError&) {
      return -1;
    }
  };

  AssignmentPlan plan;
  std::vector<bool> taken(problem.n_tasks(), false);
  int open = problem.n_tasks();

  while (open > 0) {
    // Service poses: idle agents first, then chain tails when tasks outnumber
    // the idle agents. A pose is a cell new work would be reached from.
    struct Pose {
      bool tail;  // false: idle agent, true: last task of some chain
      int id;     // agent index or task index
      Cell cell;
    };
    std::vector<Pose> poses;
    int idle = 0;
    for (int j = 0; j < problem.n_agents(); ++j) {
      if (plan.agent_task.count(j) == 0) {
        poses.push_back(Pose{false, j, problem.agent_starts[j]});
        ++idle;
      }
    }
    if (open > idle) {
      for (const auto& [agent, first] : plan.agent_task) {
        (void)agent;
        int tail = first;
        auto next = plan.consecutive.find(tail);
        while (next != plan.consecutive.end()) {
          tail = next->second;
          next = plan.consecutive.find(tail);
        }
        poses.push_back(Pose{true, tail, problem.tasks[tail].goal});
      }
      std::sort(poses.begin(), poses.end(), [](const Pose& a, const Pose& b) {
        if (a.tail != b.tail) return !a.tail;
        return a.id < b.id;
      });
    }

    int best_d = -1;
    const Pose* best_pose = nullptr;
    int best_task = -1;
    for (const Pose& pose : poses) {
      for (int task = 0; task < problem.n_tasks(); ++task) {
        if (taken[task]) continue;
        int d = distance(pose.cell, problem.tasks[task].start);
        if (d < 0) continue;
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best_pose = &pose;
          best_task = task;
        }
      }
    }
    if (best_task < 0) {
      throw InfeasibleError("no service pose can reach any open task");
    }

    if (best_pose->tail) {
      plan.consecutive[best_pose->id] = best_task;
    } else {
      plan.agent_task[best_pose->id] = best_task;
    }
    taken[best_task] = true;
    --open;
  }
  return plan;
}

long relaxed_plan_cost(const Problem& problem,
                       const std::vector<std::vector<int>>& chains,
                       DistanceMemo& memo) {
  long total = 0;
  for (int j = 0; j < problem.n_agents(); ++j) {
    long t = 0;
    Cell cur = problem.agent_starts[j];
    for (int task : chains[j]) {
      t += memo.exact(cur, problem.tasks[task].start);
      t += memo.exact(problem.tasks[task].start, problem.tasks[task].goal);
      cur = problem.tasks[task].goal;
      total += t;
    }
  }
  return total;
}

std::vector<std::vector<int>> decoupled_assign(const Problem& problem,
                                               const DecoupledConfig& config) {
  validate_problem(problem);
  require_open_problem(problem, "decoupled allocation");

  const int n = problem.n_agents();
  const int m = problem.n_tasks();
  {
    double orderings = 1.0;
    for (int i = 0; i < m; ++i) orderings *= n;
    for (int i = 2; i <= m; ++i) orderings *= i;
    if (orderings > double(config.enumeration_budget)) {
      std::ostringstream ss;
      ss << "ordering count ~" << orderings << " exceeds budget "
         << config.enumeration_budget;
      throw BudgetError(ss.str());
    }
  }

  DistanceMemo memo(problem.map);
  std::vector<std::vector<int>> chains(n), best;
  long best_cost = -1;

  auto consider = [&] {
    long cost;
    try {
      cost = relaxed_plan_cost(problem, chains, memo);
    } catch (const UnreachableError&) {
      return;  // some leg has no route under this split
    }
    if (best_cost < 0 || cost < best_cost ||
        (cost == best_cost && chains < best)) {
      best_cost = cost;
      best = chains;
    }
  };

  // For one split of tasks over agents, walk every per-agent service order.
  auto permute = [&](auto&& self, int agent) -> void {
    if (agent == n) {
      consider();
      return;
    }
    std::vector<int>& chain = chains[agent];
    if (chain.size() < 2) {
      self(self, agent + 1);
      return;
    }
    std::sort(chain.begin(), chain.end());
    do {
      self(self, agent + 1);
    } while (std::next_permutation(chain.begin(), chain.end()));
  };

  std::vector<int> owner(m, 0);
  while (true) {
    for (auto& chain : chains) chain.clear();
    for (int i = 0; i < m; ++i) chains[owner[i]].push_back(i);
    permute(permute, 0);

    int digit = 0;
    while (digit < m && ++owner[digit] == n) owner[digit++] = 0;
    if (digit == m) break;
  }

  if (best_cost < 0) {
    throw InfeasibleError("no split of the tasks is even reachable in isolation");
  }
  return best;
}

SolveResult cbs_solve(const Problem& problem,
                      const std::vector<std::vector<int>>& assignments,
                      SolverConfig config) {
  Problem fixed = problem;
  fixed.initial_assignments = assignments;
  TcbsSolver solver(fixed, config);
  return solver.solve();
}

SolveResult solve_greedy(const Problem& problem, SolverConfig config) {
  AssignmentPlan plan = greedy_assign(problem);
  return cbs_solve(problem, plan.flatten(problem.n_agents()), config);
}

SolveResult solve_decoupled(const Problem& problem, SolverConfig config,
                            DecoupledConfig dconfig) {
  std::vector<std::vector<int>> chains = decoupled_assign(problem, dconfig);
  return cbs_solve(problem, chains, config);
}

}  // namespace ctapf
