#include "ctapf/tcbs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "ctapf/errors.hpp"

namespace ctapf {

namespace {

struct OpenEntry {
  double f = 0.0;
  long h = 0;
  long constraints = 0;
  long seq = 0;
  NodePtr node;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    if (a.constraints != b.constraints) return a.constraints > b.constraints;
    return a.seq > b.seq;
  }
};

long total_assigned(const std::vector<std::vector<int>>& assignments) {
  long total = 0;
  for (const auto& chain : assignments) total += long(chain.size());
  return total;
}

long constraint_count(const SearchNode& node) {
  long total = 0;
  for (const auto& list : node.avoid) total += long(list.size());
  return total;
}

}  // namespace

TcbsSolver::TcbsSolver(const Problem& problem, SolverConfig config)
    : problem_(problem), config_(config), memo_(problem.map),
      planner_(problem.map, memo_) {
  validate_problem(problem_);
}

Path TcbsSolver::plan_agent(int agent, const std::vector<int>& chain,
                            const std::vector<Constraint>& constraints) {
  std::vector<Cell> waypoints;
  waypoints.reserve(chain.size() * 2);
  for (int task : chain) {
    waypoints.push_back(problem_.tasks[task].start);
    waypoints.push_back(problem_.tasks[task].goal);
  }
  return planner_.plan(problem_.agent_starts[agent], waypoints, constraints);
}

long TcbsSolver::partial_cost(const SearchNode& node) const {
  long total = 0;
  for (int j = 0; j < problem_.n_agents(); ++j) {
    const auto& chain = node.assignments[j];
    const auto& arrivals = node.paths[j].waypoint_arrivals;
    if (arrivals.size() != chain.size() * 2) {
      std::ostringstream ss;
      ss << "agent " << j << " path records " << arrivals.size()
         << " arrivals for " << chain.size() << " tasks";
      throw ContractError(ss.str());
    }
    for (size_t k = 0; k < chain.size(); ++k) total += arrivals[2 * k + 1].time;
  }
  return total;
}

long TcbsSolver::heuristic(const SearchNode& node) {
  std::vector<bool> assigned(problem_.n_tasks(), false);
  for (const auto& chain : node.assignments) {
    for (int task : chain) assigned[task] = true;
  }

  // Service of an open task begins either at some agent's current chain end —
  // no earlier than that agent's final delivery — or at the goal of another
  // open task appended before it; take the cheapest start plus approach plus
  // haul, distances by the admissible estimate.
  std::vector<Cell> terminals;
  std::vector<long> free_at;
  for (int j = 0; j < problem_.n_agents(); ++j) {
    const auto& chain = node.assignments[j];
    if (chain.empty()) {
      terminals.push_back(problem_.agent_starts[j]);
      free_at.push_back(0);
    } else {
      terminals.push_back(problem_.tasks[chain.back()].goal);
      free_at.push_back(node.paths[j].waypoint_arrivals.back().time);
    }
  }

  long h = 0;
  for (int i = 0; i < problem_.n_tasks(); ++i) {
    if (assigned[i]) continue;
    const Task& task = problem_.tasks[i];
    long approach = -1;
    for (size_t j = 0; j < terminals.size(); ++j) {
      long d = free_at[j] + memo_.estimate(terminals[j], task.start);
      if (approach < 0 || d < approach) approach = d;
    }
    for (int k = 0; k < problem_.n_tasks(); ++k) {
      if (k == i || assigned[k]) continue;
      long d = memo_.estimate(problem_.tasks[k].goal, task.start);
      if (d < approach) approach = d;
    }
    h += approach + memo_.estimate(task.start, task.goal);
  }
  return h;
}

void TcbsSolver::finish_node(SearchNode& node) {
  node.g = partial_cost(node);
  node.h = heuristic(node);
  std::vector<Path> padded = node.paths;
  pad_paths(padded);
  auto conflicts = detect_conflicts(padded);
  if (conflicts.empty()) {
    node.conflict.reset();
  } else {
    node.conflict = conflicts.front();
  }
}

std::string TcbsSolver::canonical_key(const SearchNode& node) const {
  std::ostringstream ss;
  for (int j = 0; j < problem_.n_agents(); ++j) {
    ss << 'A';
    for (int task : node.assignments[j]) ss << task << ',';
    ss << '/';
    std::vector<Constraint> sorted = node.avoid[j];
    std::sort(sorted.begin(), sorted.end());
    for (const Constraint& c : sorted) {
      ss << (c.kind == Constraint::Kind::VertexAvoid ? 'v' : 'e') << c.a.x << ','
         << c.a.y << ',' << c.b.x << ',' << c.b.y << ',' << c.time << ';';
    }
  }
  return ss.str();
}

NodePtr TcbsSolver::make_root() {
  // Fail fast when some task can never be served, and warm the distance memo
  // with the pairs the heuristic will lean on.
  for (int i = 0; i < problem_.n_tasks(); ++i) {
    const Task& task = problem_.tasks[i];
    try {
      memo_.exact(task.start, task.goal);
    } catch (const UnreachableError&) {
      std::ostringstream ss;
      ss << "task " << i << " start cannot reach its goal";
      throw InfeasibleError(ss.str());
    }
    bool reachable = false;
    for (const Cell& start : problem_.agent_starts) {
      try {
        memo_.exact(start, task.start);
        reachable = true;
      } catch (const UnreachableError&) {
      }
    }
    if (!reachable) {
      std::ostringstream ss;
      ss << "no agent can reach the start of task " << i;
      throw InfeasibleError(ss.str());
    }
  }

  auto node = std::make_shared<SearchNode>();
  if (problem_.initial_assignments.empty()) {
    node->assignments.assign(problem_.n_agents(), {});
  } else {
    node->assignments = problem_.initial_assignments;
  }
  node->avoid.assign(problem_.n_agents(), {});
  node->paths.resize(problem_.n_agents());
  for (int j = 0; j < problem_.n_agents(); ++j) {
    try {
      node->paths[j] = plan_agent(j, node->assignments[j], node->avoid[j]);
    } catch (const UnreachableError& e) {
      std::ostringstream ss;
      ss << "agent " << j << " cannot serve its preset chain: " << e.what();
      throw InfeasibleError(ss.str());
    }
  }
  finish_node(*node);
  stats_.root_h = node->h;
  stats_.low_level_expansions = planner_.expansions();
  return node;
}

std::vector<NodePtr> TcbsSolver::expand(const NodePtr& node) {
  std::vector<NodePtr> children;

  auto make_child = [&](int agent, std::vector<int> chain,
                        std::vector<Constraint> constraints,
                        int added_task) -> NodePtr {
    auto child = std::make_shared<SearchNode>(*node);
    child->parent = node;
    child->added_agent = agent;
    child->added_task = added_task;
    child->assignments[agent] = std::move(chain);
    child->avoid[agent] = std::move(constraints);
    try {
      child->paths[agent] =
          plan_agent(agent, child->assignments[agent], child->avoid[agent]);
    } catch (const UnreachableError&) {
      return nullptr;  // this agent simply cannot run this chain
    } catch (const InfeasibleError&) {
      return nullptr;  // constraints squeezed the route shut; dead branch
    }
    finish_node(*child);
    return child;
  };

  if (node->conflict) {
    // One child per involved agent, each told to avoid its own side of the
    // clash; everything else is inherited.
    const Conflict& c = *node->conflict;
    const int agents[2] = {c.agent_a, c.agent_b};
    for (int side = 0; side < 2; ++side) {
      int agent = agents[side];
      Constraint added =
          c.kind == Conflict::Kind::Vertex
              ? Constraint::vertex(c.cell_a, c.time)
              : (side == 0 ? Constraint::edge(c.cell_a, c.cell_b, c.time)
                           : Constraint::edge(c.cell_b, c.cell_a, c.time));
      std::vector<Constraint> constraints = node->avoid[agent];
      constraints.push_back(added);
      if (NodePtr child = make_child(agent, node->assignments[agent],
                                     std::move(constraints), -1)) {
        children.push_back(std::move(child));
      }
    }
    return children;
  }

  std::vector<bool> assigned(problem_.n_tasks(), false);
  for (const auto& chain : node->assignments) {
    for (int task : chain) assigned[task] = true;
  }
  for (int task = 0; task < problem_.n_tasks(); ++task) {
    if (assigned[task]) continue;
    for (int agent = 0; agent < problem_.n_agents(); ++agent) {
      std::vector<int> chain = node->assignments[agent];
      chain.push_back(task);
      if (NodePtr child = make_child(agent, std::move(chain),
                                     node->avoid[agent], task)) {
        children.push_back(std::move(child));
      }
    }
  }

  if (config_.mode == SearchMode::NearestNeighbor &&
      long(children.size()) > config_.nn_k) {
    std::stable_sort(children.begin(), children.end(),
                     [](const NodePtr& a, const NodePtr& b) {
                       long fa = a->g + a->h, fb = b->g + b->h;
                       if (fa != fb) return fa < fb;
                       if (a->added_agent != b->added_agent)
                         return a->added_agent < b->added_agent;
                       return a->added_task < b->added_task;
                     });
    children.resize(config_.nn_k);
  }

  stats_.low_level_expansions = planner_.expansions();
  return children;
}

SolveResult TcbsSolver::solve() {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  const double weight =
      config_.mode == SearchMode::NearestNeighbor ? config_.h_weight : 1.0;
  const long all_tasks = problem_.n_tasks();

  NodePtr root = make_root();

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::unordered_set<std::string> seen;
  long seq = 0;
  seen.insert(canonical_key(*root));
  open.push(OpenEntry{root->g + weight * root->h, root->h,
                      constraint_count(*root), seq++, root});
  stats_.nodes_generated = 1;

  while (!open.empty()) {
    NodePtr node = open.top().node;
    open.pop();
    stats_.max_popped_f = std::max(stats_.max_popped_f, node->g + node->h);
    stats_.wall_ms = elapsed_ms();
    if (stats_.wall_ms > config_.time_limit_s * 1000.0) {
      throw BudgetError("search passed its wall-clock limit");
    }

    if (!node->conflict && total_assigned(node->assignments) == all_tasks) {
      SolveResult result;
      result.solution =
          build_solution(node->paths, problem_.tasks, node->assignments);
      result.assignments = node->assignments;
      stats_.low_level_expansions = planner_.expansions();
      stats_.wall_ms = elapsed_ms();
      result.stats = stats_;
      return result;
    }

    if (++stats_.nodes_expanded > config_.node_budget) {
      throw BudgetError("search passed its node budget");
    }

    for (NodePtr& child : expand(node)) {
      if (config_.dedup && !seen.insert(canonical_key(*child)).second) continue;
      ++stats_.nodes_generated;
      open.push(OpenEntry{child->g + weight * child->h, child->h,
                          constraint_count(*child), seq++, std::move(child)});
    }
  }

  stats_.wall_ms = elapsed_ms();
  throw InfeasibleError("every branch ran out without a clash-free full plan");
}

}  // namespace ctapf
