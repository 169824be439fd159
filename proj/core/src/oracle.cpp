#include "ctapf/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ctapf {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// Plain grid BFS anchored at one cell.  The exact solver keeps its own copy of
// this instead of borrowing the planner utilities so the two routes stay
// independent down to the distance code.
std::vector<int> bfs_field(const GridMap& map, Cell anchor) {
  std::vector<int> dist(map.area(), kInf);
  std::vector<int> queue;
  dist[map.index(anchor)] = 0;
  queue.push_back(map.index(anchor));
  for (size_t head = 0; head < queue.size(); ++head) {
    int idx = queue[head];
    Cell c = map.cell_at(idx);
    const int dx[4] = {0, -1, 1, 0};
    const int dy[4] = {-1, 0, 0, 1};
    for (int k = 0; k < 4; ++k) {
      Cell nb{c.x + dx[k], c.y + dy[k]};
      if (!map.is_free(nb)) continue;
      int ni = map.index(nb);
      if (dist[ni] <= dist[idx] + 1) continue;
      dist[ni] = dist[idx] + 1;
      queue.push_back(ni);
    }
  }
  return dist;
}

// Joint state: one cell index per agent plus one status per task.
// Status: 0 pending, 1 done, 2 + j running on agent j.
struct JointSpace {
  const Problem& p;
  int area;
  int n;
  int m;
  int statuses;  // n + 2
  std::vector<std::vector<int>> from_start;  // per task, distances to its start
  std::vector<std::vector<int>> from_goal;   // per task, distances to its goal

  explicit JointSpace(const Problem& problem)
      : p(problem),
        area(problem.map.area()),
        n(problem.n_agents()),
        m(problem.n_tasks()),
        statuses(problem.n_agents() + 2) {
    for (const Task& t : p.tasks) {
      from_start.push_back(bfs_field(p.map, t.start));
      from_goal.push_back(bfs_field(p.map, t.goal));
    }
  }

  uint64_t encode(const std::vector<int>& cells, const std::vector<int>& status) const {
    uint64_t key = 0;
    for (int j = 0; j < n; ++j) key = key * uint64_t(area) + uint64_t(cells[j]);
    for (int i = 0; i < m; ++i) key = key * uint64_t(statuses) + uint64_t(status[i]);
    return key;
  }

  void decode(uint64_t key, std::vector<int>& cells, std::vector<int>& status) const {
    status.assign(m, 0);
    cells.assign(n, 0);
    for (int i = m - 1; i >= 0; --i) {
      status[i] = int(key % uint64_t(statuses));
      key /= uint64_t(statuses);
    }
    for (int j = n - 1; j >= 0; --j) {
      cells[j] = int(key % uint64_t(area));
      key /= uint64_t(area);
    }
  }

  // Task bookkeeping after a placement: per agent, deliveries first, then at
  // most one pickup (lowest pending task index whose start the agent occupies).
  void settle(const std::vector<int>& cells, std::vector<int>& status) const {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < m; ++i) {
        if (status[i] == 2 + j && p.map.index(p.tasks[i].goal) == cells[j]) {
          status[i] = 1;
        }
      }
      bool busy = false;
      for (int i = 0; i < m; ++i) busy = busy || status[i] == 2 + j;
      if (busy) continue;
      for (int i = 0; i < m; ++i) {
        if (status[i] == 0 && p.map.index(p.tasks[i].start) == cells[j]) {
          status[i] = 2 + j;
          break;
        }
      }
    }
  }

  int unfinished(const std::vector<int>& status) const {
    int u = 0;
    for (int s : status) u += (s == 1) ? 0 : 1;
    return u;
  }

  // Sum over unfinished tasks of a lower bound on their remaining completion
  // time: running tasks need at least the distance from their carrier to the
  // goal, pending ones at least the best agent's approach plus the haul.  Each
  // term can fall by at most one per step while the step charges one per
  // unfinished task, so the bound is consistent and the search stays exact.
  long remaining_bound(const std::vector<int>& cells, const std::vector<int>& status) const {
    long h = 0;
    for (int i = 0; i < m; ++i) {
      if (status[i] == 1) continue;
      if (status[i] >= 2) {
        h += from_goal[i][cells[status[i] - 2]];
        continue;
      }
      int best = kInf;
      for (int j = 0; j < n; ++j) best = std::min(best, from_start[i][cells[j]]);
      if (best >= kInf) return kInf;
      h += best + from_start[i][p.map.index(p.tasks[i].goal)];
    }
    return h;
  }
};

struct QueueItem {
  long f;
  long g;
  long seq;
  uint64_t key;
};

struct QueueOrder {
  bool operator()(const QueueItem& a, const QueueItem& b) const {
    if (a.f != b.f) return a.f > b.f;
    return a.seq > b.seq;
  }
};

}  // namespace

OracleResult brute_force_solve(const Problem& problem, const OracleConfig& config) {
  validate_problem(problem);
  if (!problem.initial_assignments.empty()) {
    throw DomainError("the reference solver takes problems without preset assignments");
  }

  JointSpace space(problem);
  const GridMap& map = problem.map;

  // Both an encoding-capacity and a tractability guard.
  {
    unsigned __int128 cap = 1;
    for (int j = 0; j < space.n; ++j) cap *= unsigned(space.area);
    for (int i = 0; i < space.m; ++i) cap *= unsigned(space.statuses);
    if (cap > (unsigned __int128)UINT64_MAX) {
      throw BudgetError("joint state space does not fit the key encoding");
    }
    double states = 1.0;
    for (int j = 0; j < space.n; ++j) states *= map.free_cell_count();
    for (int i = 0; i < space.m; ++i) states *= space.statuses;
    if (states > double(config.state_space_budget)) {
      std::ostringstream ss;
      ss << "joint state space ~" << states << " exceeds budget "
         << config.state_space_budget;
      throw BudgetError(ss.str());
    }
  }

  std::vector<int> cells(space.n), status(space.m, 0);
  for (int j = 0; j < space.n; ++j) cells[j] = map.index(problem.agent_starts[j]);
  space.settle(cells, status);
  uint64_t root = space.encode(cells, status);
  if (space.remaining_bound(cells, status) >= kInf) {
    throw InfeasibleError("some task cannot be reached or hauled by any agent");
  }

  std::priority_queue<QueueItem, std::vector<QueueItem>, QueueOrder> open;
  std::unordered_map<uint64_t, long> dist;
  std::unordered_map<uint64_t, uint64_t> parent;
  std::unordered_set<uint64_t> closed;
  dist[root] = 0;
  long seq = 0;
  open.push(QueueItem{space.remaining_bound(cells, status), 0, seq++, root});

  // Per-agent move options, stay first, then the row-major step order.
  const int dx[5] = {0, 0, -1, 1, 0};
  const int dy[5] = {0, -1, 0, 0, 1};

  long expanded = 0;
  uint64_t goal_key = 0;
  long goal_cost = -1;

  std::vector<int> cur_cells(space.n), cur_status(space.m);
  std::vector<int> next_cells(space.n), next_status(space.m);
  std::vector<int> choice(space.n, 0);

  while (!open.empty()) {
    QueueItem top = open.top();
    open.pop();
    if (!closed.insert(top.key).second) continue;
    if (++expanded > config.max_expansions) {
      throw BudgetError("reference solver exceeded its expansion budget");
    }

    space.decode(top.key, cur_cells, cur_status);
    if (space.unfinished(cur_status) == 0) {
      goal_key = top.key;
      goal_cost = top.g;
      break;
    }
    long step_cost = space.unfinished(cur_status);

    // Odometer over every joint move combination.
    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      bool valid = true;
      for (int j = 0; j < space.n && valid; ++j) {
        Cell from = map.cell_at(cur_cells[j]);
        Cell to{from.x + dx[choice[j]], from.y + dy[choice[j]]};
        if (!map.is_free(to)) {
          valid = false;
          break;
        }
        next_cells[j] = map.index(to);
      }
      if (valid) {
        for (int a = 0; a < space.n && valid; ++a) {
          for (int b = a + 1; b < space.n; ++b) {
            if (next_cells[a] == next_cells[b] ||
                (next_cells[a] == cur_cells[b] && next_cells[b] == cur_cells[a] &&
                 cur_cells[a] != cur_cells[b])) {
              valid = false;
              break;
            }
          }
        }
      }
      if (valid) {
        next_status = cur_status;
        space.settle(next_cells, next_status);
        uint64_t nk = space.encode(next_cells, next_status);
        if (closed.count(nk) == 0) {
          long ng = top.g + step_cost;
          auto it = dist.find(nk);
          if (it == dist.end() || ng < it->second) {
            long h = space.remaining_bound(next_cells, next_status);
            dist[nk] = ng;
            parent[nk] = top.key;
            open.push(QueueItem{ng + h, ng, seq++, nk});
            if (long(dist.size()) > config.state_space_budget) {
              throw BudgetError("reference solver state store exceeded its budget");
            }
          }
        }
      }
      int j = 0;
      while (j < space.n && ++choice[j] == 5) choice[j++] = 0;
      if (j == space.n) break;
    }
  }

  if (goal_cost < 0) {
    throw InfeasibleError("no collision-free execution finishes every task");
  }

  // Rebuild the joint trajectory root -> goal.
  std::vector<uint64_t> chain{goal_key};
  while (chain.back() != root) chain.push_back(parent.at(chain.back()));
  std::reverse(chain.begin(), chain.end());

  OracleResult result;
  result.expanded = expanded;
  result.assignments.assign(space.n, {});
  std::vector<Path> paths(space.n);
  std::vector<int> completion(problem.n_tasks(), -1);

  std::vector<int> prev_status;
  for (size_t t = 0; t < chain.size(); ++t) {
    space.decode(chain[t], cur_cells, cur_status);
    for (int j = 0; j < space.n; ++j) {
      paths[j].cells.push_back(map.cell_at(cur_cells[j]));
    }
    // Deliveries first so a same-step pickup lands after the closing arrival.
    for (int i = 0; i < space.m; ++i) {
      int before = t == 0 ? -1 : prev_status[i];
      if (cur_status[i] == 1 && before != 1 && t > 0) {
        completion[i] = int(t);
        for (int j = 0; j < space.n; ++j) {
          if (prev_status[i] == 2 + j) {
            paths[j].waypoint_arrivals.push_back(
                WaypointArrival{int(paths[j].waypoint_arrivals.size()), int(t)});
          }
        }
      }
    }
    for (int i = 0; i < space.m; ++i) {
      int before = t == 0 ? -1 : prev_status[i];
      if (cur_status[i] >= 2 && before != cur_status[i]) {
        int agent = cur_status[i] - 2;
        result.assignments[agent].push_back(i);
        paths[agent].waypoint_arrivals.push_back(
            WaypointArrival{int(paths[agent].waypoint_arrivals.size()), int(t)});
      }
    }
    prev_status = cur_status;
  }

  long total = 0;
  for (int i = 0; i < space.m; ++i) {
    if (completion[i] < 0) throw ContractError("finished search left a task incomplete");
    total += completion[i];
  }
  if (total != goal_cost) {
    std::ostringstream ss;
    ss << "per-step charge " << goal_cost << " disagrees with summed completions "
       << total;
    throw ContractError(ss.str());
  }

  pad_paths(paths);
  result.solution.horizon = paths.empty() ? 0 : paths[0].final_time();
  result.solution.paths = std::move(paths);
  result.solution.task_completion = std::move(completion);
  result.solution.total_cost = total;
  return result;
}

}  // namespace ctapf
