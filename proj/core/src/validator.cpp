#include "ctapf/validator.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace ctapf {

const char* violation_kind_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::PathShape: return "path-shape";
    case Violation::Kind::BadStart: return "bad-start";
    case Violation::Kind::BadStep: return "bad-step";
    case Violation::Kind::VertexClash: return "vertex-clash";
    case Violation::Kind::EdgeClash: return "edge-clash";
    case Violation::Kind::UnfulfilledTask: return "unfulfilled-task";
    case Violation::Kind::DoubleFulfilledTask: return "double-fulfilled-task";
    case Violation::Kind::AmbiguousStart: return "ambiguous-start";
    case Violation::Kind::IncidentalBinding: return "incidental-binding";
    case Violation::Kind::CostMismatch: return "cost-mismatch";
  }
  return "unknown";
}

std::ostream& operator<<(std::ostream& os, const Violation& v) {
  os << violation_kind_name(v.kind) << ": " << v.detail;
  return os;
}

ValidationReport validate_solution(const Problem& problem, const Solution& solution,
                                   bool strict) {
  ValidationReport report;
  auto add = [&report](Violation::Kind kind, const std::string& detail, int agent = -1,
                       int task = -1, int time = -1) {
    report.violations.push_back(Violation{kind, detail, agent, task, time});
  };

  const auto& paths = solution.paths;
  if (int(paths.size()) != problem.n_agents()) {
    add(Violation::Kind::PathShape,
        "solution has " + std::to_string(paths.size()) + " paths for " +
            std::to_string(problem.n_agents()) + " agents");
    return report;
  }
  size_t len = paths.empty() ? 0 : paths[0].cells.size();
  for (size_t j = 0; j < paths.size(); ++j) {
    if (paths[j].cells.empty() || paths[j].cells.size() != len) {
      add(Violation::Kind::PathShape, "path " + std::to_string(j) + " length differs",
          int(j));
      return report;
    }
  }

  for (size_t j = 0; j < paths.size(); ++j) {
    const auto& cells = paths[j].cells;
    if (!(cells[0] == problem.agent_starts[j])) {
      std::ostringstream ss;
      ss << "agent " << j << " path begins at " << cells[0] << ", start is "
         << problem.agent_starts[j];
      add(Violation::Kind::BadStart, ss.str(), int(j), -1, 0);
    }
    for (size_t t = 0; t < cells.size(); ++t) {
      if (!problem.map.is_free(cells[t])) {
        std::ostringstream ss;
        ss << "agent " << j << " stands on blocked cell " << cells[t] << " at t=" << t;
        add(Violation::Kind::BadStep, ss.str(), int(j), -1, int(t));
        continue;
      }
      if (t + 1 < cells.size()) {
        int d = manhattan(cells[t], cells[t + 1]);
        if (d > 1) {
          std::ostringstream ss;
          ss << "agent " << j << " jumps " << cells[t] << " -> " << cells[t + 1]
             << " at t=" << t;
          add(Violation::Kind::BadStep, ss.str(), int(j), -1, int(t));
        }
      }
    }
  }
  if (!report.ok()) return report;  // later checks assume sane shapes

  for (const Conflict& c : detect_conflicts(paths)) {
    std::ostringstream ss;
    ss << c;
    add(c.kind == Conflict::Kind::Vertex ? Violation::Kind::VertexClash
                                         : Violation::Kind::EdgeClash,
        ss.str(), c.agent_a, -1, c.time);
  }

  // Delivery coverage. The recorded completion times are the claim; each must
  // be explainable as "this path touched the task's start, and this is the
  // first goal touch after that". Which crossings actually bind is settled by
  // those times, not by the literal crossing rule (a path may wander over a
  // foreign start cell); strict mode adds the literal reading below.
  auto realizes = [](const std::vector<Cell>& cells, const Task& task, int from,
                     int at) {
    if (at < 1 || at >= int(cells.size()) || !(cells[at] == task.goal)) {
      return false;
    }
    // Walking backwards, the nearest start touch must come before any goal
    // touch, else `at` is not the first arrival after any usable binding.
    for (int t = at - 1; t >= from; --t) {
      if (cells[t] == task.goal) return false;
      if (cells[t] == task.start) return true;
    }
    return false;
  };
  auto earliest_delivery = [](const std::vector<Cell>& cells, const Task& task) {
    size_t t = 0;
    while (t < cells.size() && !(cells[t] == task.start)) ++t;
    for (++t; t < cells.size(); ++t) {
      if (cells[t] == task.goal) return int(t);
    }
    return -1;
  };

  const int m = int(problem.tasks.size());
  auto recorded = [&](int i) {
    return i < int(solution.task_completion.size()) ? solution.task_completion[i]
                                                    : -1;
  };
  std::vector<std::vector<int>> claims(paths.size());
  std::vector<bool> attributed(m, false);
  for (int i = 0; i < m; ++i) {
    const Task& task = problem.tasks[i];
    const int at = recorded(i);
    std::vector<int> realizers;
    for (size_t j = 0; j < paths.size(); ++j) {
      if (realizes(paths[j].cells, task, 0, at)) realizers.push_back(int(j));
    }
    if (realizers.empty()) {
      int best = -1, who = -1;
      for (size_t j = 0; j < paths.size(); ++j) {
        int u = earliest_delivery(paths[j].cells, task);
        if (u >= 0 && (best < 0 || u < best)) {
          best = u;
          who = int(j);
        }
      }
      if (best < 0) {
        std::ostringstream ss;
        ss << "task " << i << " " << task << " is never delivered";
        add(Violation::Kind::UnfulfilledTask, ss.str(), -1, i);
      } else {
        std::ostringstream ss;
        ss << "task " << i << " completes at t=" << best
           << " but the solution records " << at;
        add(Violation::Kind::CostMismatch, ss.str(), who, i, best);
      }
      continue;
    }
    if (realizers.size() > 1) {
      std::ostringstream ss;
      ss << "task " << i << " delivered by agents " << realizers[0] << " and "
         << realizers[1];
      add(Violation::Kind::DoubleFulfilledTask, ss.str(), realizers[1], i, at);
    }
    attributed[i] = true;
    claims[realizers[0]].push_back(i);
  }

  // One path may claim several tasks only if a single pass fits them all:
  // each binding must come at or after the previous delivery.
  for (size_t j = 0; j < paths.size(); ++j) {
    std::sort(claims[j].begin(), claims[j].end(), [&](int a, int b) {
      if (recorded(a) != recorded(b)) return recorded(a) < recorded(b);
      return a < b;
    });
    int from = 0;
    for (int i : claims[j]) {
      if (!realizes(paths[j].cells, problem.tasks[i], from, recorded(i))) {
        std::ostringstream ss;
        ss << "task " << i << " recorded at t=" << recorded(i)
           << " does not fit into agent " << j << "'s delivery order";
        add(Violation::Kind::CostMismatch, ss.str(), int(j), i, recorded(i));
        attributed[i] = false;
      } else {
        from = recorded(i);
      }
    }
  }

  if (solution.task_completion.size() != problem.tasks.size()) {
    add(Violation::Kind::CostMismatch,
        "solution records " + std::to_string(solution.task_completion.size()) +
            " completion times for " + std::to_string(problem.tasks.size()) +
            " tasks");
  }
  bool all_attributed = solution.task_completion.size() == problem.tasks.size();
  long recomputed_total = 0;
  for (int i = 0; i < m; ++i) {
    if (!attributed[i]) all_attributed = false;
    recomputed_total += std::max(0, recorded(i));
  }
  if (all_attributed && solution.total_cost != recomputed_total) {
    add(Violation::Kind::CostMismatch,
        "total cost " + std::to_string(solution.total_cost) + " but paths yield " +
            std::to_string(recomputed_total));
  }

  if (strict) {
    // The literal reading of the start-cell rule: any idle crossing binds.
    std::vector<std::vector<int>> literal_by(m);
    for (size_t j = 0; j < paths.size(); ++j) {
      std::vector<TaskEvent> events;
      try {
        events = scan_path_tasks(paths[j].cells, problem.tasks);
      } catch (const AmbiguityError& e) {
        add(Violation::Kind::AmbiguousStart, e.what(), int(j));
        continue;
      }
      for (const TaskEvent& e : events) {
        if (e.completion_time < 0) {
          std::ostringstream ss;
          ss << "agent " << j << " crosses the start of task " << e.task
             << " at t=" << e.start_time << " and never delivers it";
          add(Violation::Kind::IncidentalBinding, ss.str(), int(j), e.task,
              e.start_time);
        } else {
          literal_by[e.task].push_back(int(j));
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      if (literal_by[i].size() > 1) {
        std::ostringstream ss;
        ss << "task " << i << " delivered by agents " << literal_by[i][0]
           << " and " << literal_by[i][1] << " under the crossing rule";
        add(Violation::Kind::DoubleFulfilledTask, ss.str(), literal_by[i][1], i);
      }
    }
  }
  return report;
}

}  // namespace ctapf
