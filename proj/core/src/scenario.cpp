#include "ctapf/scenario.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ctapf/errors.hpp"

namespace ctapf {

namespace {

using nlohmann::json;

bool all_connected(const GridMap& map, const std::vector<Cell>& cells) {
  if (cells.empty()) return true;
  std::vector<uint8_t> seen(map.area(), 0);
  std::vector<int> queue{map.index(cells[0])};
  seen[queue[0]] = 1;
  for (size_t head = 0; head < queue.size(); ++head) {
    for (const Cell& nb : neighbors(map, map.cell_at(queue[head]))) {
      int ni = map.index(nb);
      if (!seen[ni]) {
        seen[ni] = 1;
        queue.push_back(ni);
      }
    }
  }
  for (const Cell& c : cells) {
    if (!seen[map.index(c)]) return false;
  }
  return true;
}

Cell cell_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    throw FormatError("a cell must be a two-integer array");
  }
  return Cell{j[0].get<int>(), j[1].get<int>()};
}

json cell_to_json(const Cell& c) { return json::array({c.x, c.y}); }

}  // namespace

Problem gen_scenario(const ScenarioSpec& spec) {
  if (spec.width < 1 || spec.height < 1) {
    throw DomainError("scenario needs positive map dimensions");
  }
  if (spec.obstacle_density < 0.0 || spec.obstacle_density >= 1.0) {
    throw DomainError("obstacle density must lie in [0, 1)");
  }
  if (spec.n_agents < 1 || spec.m_tasks < 1) {
    throw DomainError("scenario needs at least one agent and one task");
  }

  const int area = spec.width * spec.height;
  const int n_obstacles = int(std::floor(area * spec.obstacle_density));
  const int needed = n_obstacles + spec.n_agents + 2 * spec.m_tasks;
  if (needed > area) {
    std::ostringstream ss;
    ss << "scenario needs " << needed << " distinct cells on an area of " << area;
    throw GenerationError(ss.str());
  }

  constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  for (uint64_t attempt = 0; attempt < 100; ++attempt) {
    std::mt19937_64 rng(spec.seed ^ (kGolden * attempt));

    // One partial shuffle covers everything: the first cells become
    // obstacles, the rest of the drawn prefix the agents and task endpoints,
    // all distinct by construction.
    std::vector<Cell> cells;
    cells.reserve(area);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) cells.push_back(Cell{x, y});
    }
    for (int i = 0; i < needed; ++i) {
      int j = i + int(rng() % uint64_t(area - i));
      std::swap(cells[i], cells[j]);
    }

    std::vector<Cell> obstacles(cells.begin(), cells.begin() + n_obstacles);
    GridMap map(spec.width, spec.height, obstacles);

    Problem problem{std::move(map), {}, {}, {}};
    int at = n_obstacles;
    for (int j = 0; j < spec.n_agents; ++j) problem.agent_starts.push_back(cells[at++]);
    std::vector<Cell> starts, goals;
    for (int i = 0; i < spec.m_tasks; ++i) starts.push_back(cells[at++]);
    for (int i = 0; i < spec.m_tasks; ++i) goals.push_back(cells[at++]);
    for (int i = 0; i < spec.m_tasks; ++i) {
      problem.tasks.push_back(Task{starts[i], goals[i]});
    }

    std::vector<Cell> everyone = problem.agent_starts;
    everyone.insert(everyone.end(), starts.begin(), starts.end());
    everyone.insert(everyone.end(), goals.begin(), goals.end());
    if (!all_connected(problem.map, everyone)) continue;

    validate_problem(problem);
    return problem;
  }

  std::ostringstream ss;
  ss << "no mutually reachable draw for seed " << spec.seed << " in 100 attempts";
  throw GenerationError(ss.str());
}

std::string problem_to_json(const Problem& problem) {
  json j;
  j["map"]["width"] = problem.map.width();
  j["map"]["height"] = problem.map.height();
  j["map"]["obstacles"] = json::array();
  for (const Cell& c : problem.map.obstacles()) {
    j["map"]["obstacles"].push_back(cell_to_json(c));
  }
  j["agents"] = json::array();
  for (const Cell& c : problem.agent_starts) j["agents"].push_back(cell_to_json(c));
  j["tasks"] = json::array();
  for (const Task& t : problem.tasks) {
    j["tasks"].push_back({{"start", cell_to_json(t.start)},
                          {"goal", cell_to_json(t.goal)}});
  }
  if (!problem.initial_assignments.empty()) {
    j["initial_assignments"] = problem.initial_assignments;
  }
  return j.dump(2) + "\n";
}

Problem problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad problem JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("map") || !j.contains("agents") ||
        !j.contains("tasks")) {
      throw FormatError("problem JSON needs map, agents and tasks");
    }
    const json& jm = j["map"];
    if (!jm.contains("width") || !jm.contains("height")) {
      throw FormatError("map JSON needs width and height");
    }
    std::vector<Cell> obstacles;
    for (const json& jc : jm.value("obstacles", json::array())) {
      obstacles.push_back(cell_from_json(jc));
    }
    GridMap map(jm["width"].get<int>(), jm["height"].get<int>(), obstacles);

    Problem problem{std::move(map), {}, {}, {}};
    for (const json& jc : j["agents"]) {
      problem.agent_starts.push_back(cell_from_json(jc));
    }
    for (const json& jt : j["tasks"]) {
      if (!jt.is_object() || !jt.contains("start") || !jt.contains("goal")) {
        throw FormatError("every task needs a start and a goal");
      }
      problem.tasks.push_back(
          Task{cell_from_json(jt["start"]), cell_from_json(jt["goal"])});
    }
    if (j.contains("initial_assignments")) {
      problem.initial_assignments =
          j["initial_assignments"].get<std::vector<std::vector<int>>>();
    }
    validate_problem(problem);
    return problem;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad problem JSON: ") + e.what());
  }
}

std::string solution_to_json(const Solution& solution) {
  json j;
  j["paths"] = json::array();
  for (const Path& p : solution.paths) {
    json jp = json::array();
    for (const Cell& c : p.cells) jp.push_back(cell_to_json(c));
    j["paths"].push_back(std::move(jp));
  }
  j["task_completion"] = solution.task_completion;
  j["total_cost"] = solution.total_cost;
  return j.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad solution JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("paths") ||
        !j.contains("task_completion") || !j.contains("total_cost")) {
      throw FormatError("solution JSON needs paths, task_completion, total_cost");
    }
    Solution solution;
    for (const json& jp : j["paths"]) {
      Path path;
      for (const json& jc : jp) path.cells.push_back(cell_from_json(jc));
      solution.paths.push_back(std::move(path));
    }
    solution.task_completion = j["task_completion"].get<std::vector<int>>();
    solution.total_cost = j["total_cost"].get<long>();
    for (const Path& p : solution.paths) {
      solution.horizon = std::max(solution.horizon, p.final_time());
    }
    return solution;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad solution JSON: ") + e.what());
  }
}

}  // namespace ctapf
