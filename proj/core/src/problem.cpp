#include "ctapf/problem.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace ctapf {

std::ostream& operator<<(std::ostream& os, const Task& t) {
  return os << t.start << "->" << t.goal;
}

std::ostream& operator<<(std::ostream& os, const Conflict& c) {
  os << (c.kind == Conflict::Kind::Vertex ? "vertex" : "edge") << " conflict agents "
     << c.agent_a << "/" << c.agent_b << " @t=" << c.time << " " << c.cell_a;
  if (c.kind == Conflict::Kind::Edge) os << "<->" << c.cell_b;
  return os;
}

void validate_problem(const Problem& p) {
  if (p.agent_starts.empty()) throw FormatError("problem has no agents");
  std::unordered_set<int> seen;
  for (const Cell& c : p.agent_starts) {
    if (!p.map.is_free(c)) {
      std::ostringstream ss;
      ss << "agent start not free: " << c;
      throw FormatError(ss.str());
    }
    if (!seen.insert(p.map.index(c)).second) {
      std::ostringstream ss;
      ss << "duplicate agent start: " << c;
      throw FormatError(ss.str());
    }
  }
  for (const Task& t : p.tasks) {
    if (!p.map.is_free(t.start) || !p.map.is_free(t.goal)) {
      std::ostringstream ss;
      ss << "task endpoint not free: " << t;
      throw FormatError(ss.str());
    }
    if (t.start == t.goal) {
      std::ostringstream ss;
      ss << "task start equals goal: " << t;
      throw FormatError(ss.str());
    }
  }
  if (!p.initial_assignments.empty()) {
    if (int(p.initial_assignments.size()) != p.n_agents()) {
      throw FormatError("initial assignments must list every agent");
    }
    std::unordered_set<int> used;
    for (const auto& list : p.initial_assignments) {
      for (int t : list) {
        if (t < 0 || t >= p.n_tasks()) {
          throw FormatError("initial assignment references unknown task " +
                            std::to_string(t));
        }
        if (!used.insert(t).second) {
          throw FormatError("task " + std::to_string(t) +
                            " appears twice in initial assignments");
        }
      }
    }
  }
}

std::vector<Conflict> detect_conflicts(const std::vector<Path>& paths) {
  if (paths.empty()) return {};
  size_t len = paths[0].cells.size();
  for (const Path& p : paths) {
    if (p.cells.empty()) throw ContractError("conflict scan on empty path");
    if (p.cells.size() != len) {
      throw ContractError("conflict scan needs equal-length paths, got " +
                          std::to_string(p.cells.size()) + " vs " +
                          std::to_string(len));
    }
  }
  int n = int(paths.size());
  std::vector<Conflict> out;
  for (int t = 0; t < int(len); ++t) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (paths[i].cells[t] == paths[j].cells[t]) {
          out.push_back(Conflict{Conflict::Kind::Vertex, i, j, t,
                                 paths[i].cells[t], paths[i].cells[t]});
        }
        if (t + 1 < int(len) && paths[i].cells[t] == paths[j].cells[t + 1] &&
            paths[i].cells[t + 1] == paths[j].cells[t]) {
          // Swap across one edge; skip the degenerate both-waiting case,
          // which the vertex check above already reported.
          if (!(paths[i].cells[t] == paths[i].cells[t + 1])) {
            out.push_back(Conflict{Conflict::Kind::Edge, i, j, t,
                                   paths[i].cells[t], paths[i].cells[t + 1]});
          }
        }
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Conflict& a, const Conflict& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.agent_a != b.agent_a) return a.agent_a < b.agent_a;
    if (a.agent_b != b.agent_b) return a.agent_b < b.agent_b;
    return int(a.kind) < int(b.kind);
  });
  return out;
}

namespace {

std::vector<TaskEvent> scan_impl(const std::vector<Cell>& cells,
                                 const std::vector<Task>& tasks,
                                 bool require_completion) {
  std::vector<TaskEvent> events;
  std::vector<char> consumed(tasks.size(), 0);
  int running = -1;
  for (int t = 0; t < int(cells.size()); ++t) {
    const Cell& here = cells[t];
    if (running >= 0 && here == tasks[running].goal) {
      events.back().completion_time = t;
      running = -1;
    }
    if (running < 0) {
      int found = -1;
      bool ambiguous = false;
      for (int i = 0; i < int(tasks.size()); ++i) {
        if (consumed[i] || !(tasks[i].start == here)) continue;
        if (require_completion) {
          // Only bind when this path actually delivers the task later.
          bool delivers = false;
          for (int u = t + 1; u < int(cells.size()); ++u) {
            if (cells[u] == tasks[i].goal) {
              delivers = true;
              break;
            }
          }
          if (!delivers) continue;
        }
        if (found >= 0) {
          ambiguous = true;
          break;
        }
        found = i;
      }
      if (ambiguous) {
        std::ostringstream ss;
        ss << "two pending tasks start at " << here << " under an idle agent at t=" << t;
        throw AmbiguityError(ss.str());
      }
      if (found >= 0) {
        consumed[found] = 1;
        running = found;
        events.push_back(TaskEvent{found, t, -1});
      }
    }
  }
  return events;
}

}  // namespace

std::vector<TaskEvent> scan_path_tasks(const std::vector<Cell>& cells,
                                       const std::vector<Task>& tasks) {
  return scan_impl(cells, tasks, false);
}

std::vector<TaskEvent> scan_path_tasks_completed(const std::vector<Cell>& cells,
                                                 const std::vector<Task>& tasks) {
  return scan_impl(cells, tasks, true);
}

std::vector<int> implicit_assignment(const std::vector<Cell>& cells,
                                     const std::vector<Task>& tasks) {
  std::vector<int> order;
  for (const TaskEvent& e : scan_path_tasks(cells, tasks)) order.push_back(e.task);
  return order;
}

CostBreakdown solution_cost(const std::vector<Path>& paths,
                            const std::vector<Task>& tasks,
                            const std::vector<std::vector<int>>& assignments) {
  if (assignments.size() != paths.size()) {
    throw ContractError("assignments and paths disagree on agent count");
  }
  CostBreakdown out;
  out.completion.assign(tasks.size(), -1);
  for (size_t j = 0; j < paths.size(); ++j) {
    const auto& list = assignments[j];
    const auto& arrivals = paths[j].waypoint_arrivals;
    if (arrivals.size() != 2 * list.size()) {
      throw ContractError("agent " + std::to_string(j) + " path records " +
                          std::to_string(arrivals.size()) + " arrivals for " +
                          std::to_string(list.size()) + " tasks");
    }
    for (size_t k = 0; k < list.size(); ++k) {
      int task = list[k];
      if (task < 0 || task >= int(tasks.size())) {
        throw ContractError("assignment references unknown task " + std::to_string(task));
      }
      if (out.completion[task] >= 0) {
        throw ContractError("task " + std::to_string(task) + " assigned twice");
      }
      out.completion[task] = arrivals[2 * k + 1].time;
    }
  }
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (out.completion[i] < 0) {
      throw ContractError("task " + std::to_string(i) + " has no goal arrival");
    }
    out.total += out.completion[i];
  }
  return out;
}

Solution build_solution(std::vector<Path> paths, const std::vector<Task>& tasks,
                        const std::vector<std::vector<int>>& assignments) {
  CostBreakdown cost = solution_cost(paths, tasks, assignments);
  pad_paths(paths);
  Solution s;
  s.horizon = paths.empty() ? 0 : paths[0].final_time();
  s.paths = std::move(paths);
  s.task_completion = std::move(cost.completion);
  s.total_cost = cost.total;
  return s;
}

}  // namespace ctapf
