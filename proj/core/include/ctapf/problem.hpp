#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "ctapf/grid_map.hpp"
#include "ctapf/spacetime.hpp"

namespace ctapf {

// A transport request: reach start, then carry to goal. An agent that stands
// on the start cell of a pending task while idle begins it and is busy until
// it reaches the goal cell.
struct Task {
  Cell start;
  Cell goal;

  bool operator==(const Task& o) const { return start == o.start && goal == o.goal; }
};

std::ostream& operator<<(std::ostream& os, const Task& t);

struct Problem {
  GridMap map;
  std::vector<Cell> agent_starts;
  std::vector<Task> tasks;
  // Optional fixed assignment prefixes, one list of task indices per agent.
  // Empty means every task is open. Solvers treat these as already committed.
  std::vector<std::vector<int>> initial_assignments;

  int n_agents() const { return int(agent_starts.size()); }
  int n_tasks() const { return int(tasks.size()); }
};

// Throws FormatError when the instance is malformed: agents on non-free or
// duplicate cells, task endpoints non-free, a task whose start equals its
// goal, or initial assignments referencing unknown agents/tasks.
void validate_problem(const Problem& p);

struct Conflict {
  enum class Kind : uint8_t { Vertex, Edge };

  Kind kind = Kind::Vertex;
  int agent_a = 0;  // always < agent_b
  int agent_b = 0;
  int time = 0;     // Edge: departure step, occupying cell_a at t, cell_b at t+1
  Cell cell_a;      // Vertex: the shared cell. Edge: agent_a's from cell.
  Cell cell_b;      // Vertex: equals cell_a. Edge: agent_a's to cell.

  bool operator==(const Conflict& o) const {
    return kind == o.kind && agent_a == o.agent_a && agent_b == o.agent_b &&
           time == o.time && cell_a == o.cell_a && cell_b == o.cell_b;
  }
};

std::ostream& operator<<(std::ostream& os, const Conflict& c);

// Every vertex and swap conflict between the padded, equal-length paths,
// ordered by time, then by the lower agent pair (vertex before edge on full
// ties). Paths persist on their final cell, so two agents parked on the same
// cell collide at every step. Throws ContractError on unequal path lengths.
std::vector<Conflict> detect_conflicts(const std::vector<Path>& paths);

struct TaskEvent {
  int task = -1;
  int start_time = -1;
  int completion_time = -1;  // -1 when the path ends while still carrying
};

// Literal reading of the start-cell rule applied to one path: standing idle
// on a pending task's start begins it (completing a task and starting the
// next can share a step), reaching its goal ends it. Two pending tasks with
// the same start cell under an idle agent throw AmbiguityError. Returns the
// events in activation order; a still-running task is included with
// completion_time -1.
std::vector<TaskEvent> scan_path_tasks(const std::vector<Cell>& cells,
                                       const std::vector<Task>& tasks);

// As scan_path_tasks, but a start-cell visit only begins a task when the path
// later reaches that task's goal; otherwise the visit is treated as passing
// through. This is the reading used to judge solver output, where the
// assignment list, not the path shape, decides who runs what.
std::vector<TaskEvent> scan_path_tasks_completed(const std::vector<Cell>& cells,
                                                 const std::vector<Task>& tasks);

// Task indices in activation order under the literal scan.
std::vector<int> implicit_assignment(const std::vector<Cell>& cells,
                                     const std::vector<Task>& tasks);

struct CostBreakdown {
  std::vector<int> completion;  // per task, absolute time of its goal arrival
  long total = 0;               // sum over tasks
};

// Completion times read from the recorded waypoint arrivals: the path of a
// task's agent holds arrivals [start0, goal0, start1, goal1, ...] for its
// assigned list. Throws ContractError when a task's goal arrival is missing
// or a task is not assigned exactly once.
CostBreakdown solution_cost(const std::vector<Path>& paths,
                            const std::vector<Task>& tasks,
                            const std::vector<std::vector<int>>& assignments);

struct Solution {
  std::vector<Path> paths;         // padded to one shared horizon
  std::vector<int> task_completion;
  long total_cost = 0;
  int horizon = 0;
};

// Pads the paths and fills completion times and cost from their arrivals.
Solution build_solution(std::vector<Path> paths, const std::vector<Task>& tasks,
                        const std::vector<std::vector<int>>& assignments);

}  // namespace ctapf
