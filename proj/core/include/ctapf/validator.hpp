#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ctapf/problem.hpp"

namespace ctapf {

struct Violation {
  enum class Kind : uint8_t {
    PathShape,         // empty path set, empty path, or unequal lengths
    BadStart,          // path 0th cell differs from the agent's start
    BadStep,           // teleport: consecutive cells not equal or 4-adjacent free
    VertexClash,       // two agents share a cell at one time
    EdgeClash,         // two agents swap cells across one step
    UnfulfilledTask,   // no path delivers the task
    DoubleFulfilledTask,  // two paths deliver the same task
    AmbiguousStart,    // strict mode: idle crossing of a start shared by two tasks
    IncidentalBinding, // strict mode: a path crosses a start cell it never delivers
    CostMismatch,      // recorded completion times cannot be realized by the paths
  };

  Kind kind;
  std::string detail;
  int agent = -1;
  int task = -1;
  int time = -1;
};

const char* violation_kind_name(Violation::Kind k);
std::ostream& operator<<(std::ostream& os, const Violation& v);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks a solution against its problem and returns every violation found:
// path shape and start cells, step adjacency, vertex and swap collisions,
// and task coverage. Each recorded completion time must be realizable as an
// actual delivery — the path touches the task's start and the recorded time
// is the first goal arrival after that — and the tasks one path accounts for
// must fit a single sequential pass; the total must sum the completions.
//
// By default the assignment behind the solution is taken as authoritative:
// a path may wander across the start (or even start and goal) of a task it
// was never meant to serve, as long as the recorded times tell a coherent
// story. With strict=true the literal reading of the start-cell rule is
// checked too: any idle crossing binds, so unserved crossings come back as
// IncidentalBinding, shared-start crossings as AmbiguousStart, and shadow
// deliveries as DoubleFulfilledTask.
ValidationReport validate_solution(const Problem& problem, const Solution& solution,
                                   bool strict = false);

}  // namespace ctapf
