#pragma once

#include <cstdint>
#include <string>

#include "ctapf/problem.hpp"

namespace ctapf {

struct ScenarioSpec {
  uint64_t seed = 1;
  int width = 8;
  int height = 8;
  double obstacle_density = 0.2;  // fraction of cells blocked, floor(w*h*d)
  int n_agents = 3;
  int m_tasks = 2;
};

// Draws a random instance: obstacles, distinct agent starts, distinct task
// endpoints, everything mutually reachable. Identical specs give identical
// instances, on any platform. Redraws (with a derived sub-seed) when the
// reachability check fails; throws GenerationError when 100 draws all fail
// or the cells just don't fit, DomainError on a nonsense spec.
Problem gen_scenario(const ScenarioSpec& spec);

// JSON forms used by the command-line tools. Problems:
//   {"map": {"width": W, "height": H, "obstacles": [[x, y], ...]},
//    "agents": [[x, y], ...],
//    "tasks": [{"start": [x, y], "goal": [x, y]}, ...]}
// plus "initial_assignments": [[task, ...], ...] when present. Solutions:
//   {"paths": [[[x, y], ...], ...],
//    "task_completion": [t, ...],
//    "total_cost": c}
// Parsers throw FormatError on anything malformed.
std::string problem_to_json(const Problem& problem);
Problem problem_from_json(const std::string& text);
std::string solution_to_json(const Solution& solution);
Solution solution_from_json(const std::string& text);

}  // namespace ctapf
