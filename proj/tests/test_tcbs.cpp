#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "ctapf/oracle.hpp"
#include "ctapf/scenario.hpp"
#include "ctapf/tcbs.hpp"
#include "ctapf/validator.hpp"

using namespace ctapf;

namespace {

Problem load_fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return problem_from_json(ss.str());
}

Problem open_board() {
  return Problem{parse_map(".....\n.....\n.....\n.....\n.....\n"),
                 {Cell{0, 0}, Cell{4, 4}},
                 {Task{Cell{1, 1}, Cell{3, 1}}, Task{Cell{1, 3}, Cell{3, 3}},
                  Task{Cell{2, 2}, Cell{4, 2}}},
                 {}};
}

}  // namespace

TEST_CASE("a fresh root branches over every task-agent pair") {
  Problem p = open_board();
  TcbsSolver solver(p);
  NodePtr root = solver.make_root();
  CHECK_FALSE(root->conflict.has_value());
  CHECK(root->g == 0);
  CHECK(root->h > 0);

  auto children = solver.expand(root);
  REQUIRE(children.size() == 6);  // 3 tasks x 2 agents
  std::set<std::pair<int, int>> pairs;
  for (const NodePtr& child : children) {
    pairs.insert({child->added_task, child->added_agent});
    int assigned = 0;
    for (const auto& chain : child->assignments) assigned += int(chain.size());
    CHECK(assigned == 1);
    CHECK(child->assignments[child->added_agent] ==
          std::vector<int>{child->added_task});
    CHECK(child->parent == root);
  }
  CHECK(pairs.size() == 6);
  for (int task = 0; task < 3; ++task) {
    for (int agent = 0; agent < 2; ++agent) {
      CHECK(pairs.count({task, agent}) == 1);
    }
  }
}

TEST_CASE("a clashing node branches into exactly the two one-sided children") {
  // Fixed chains send both agents head-on down row 0; they must meet.
  Problem p{parse_map(".....\n.....\n"),
            {Cell{0, 0}, Cell{4, 0}},
            {Task{Cell{4, 0}, Cell{4, 1}}, Task{Cell{0, 0}, Cell{0, 1}}},
            {{0}, {1}}};
  TcbsSolver solver(p);
  NodePtr root = solver.make_root();
  REQUIRE(root->conflict.has_value());
  CHECK(root->conflict->kind == Conflict::Kind::Vertex);
  CHECK(root->conflict->time == 2);
  CHECK(root->conflict->cell_a == Cell{2, 0});

  auto children = solver.expand(root);
  REQUIRE(children.size() == 2);
  CHECK(children[0]->added_agent == 0);
  CHECK(children[1]->added_agent == 1);
  CHECK(children[0]->avoid[0].size() == 1);
  CHECK(children[0]->avoid[1].empty());
  CHECK(children[1]->avoid[1].size() == 1);
  CHECK(children[1]->avoid[0].empty());
  // Assignments are frozen along conflict branches.
  CHECK(children[0]->assignments == root->assignments);
  CHECK(children[1]->assignments == root->assignments);

  // Waiting can't resolve a head-on pass in one row: one agent must take the
  // two-step dip through row 1, finishing at t=7 against the other's t=5.
  SolveResult result = solver.solve();
  CHECK(result.solution.total_cost == 12);
  CHECK(validate_solution(p, result.solution).ok());
}

TEST_CASE("nearest-neighbor mode keeps only the cheapest assignment children") {
  Problem p = open_board();
  SolverConfig nn;
  nn.mode = SearchMode::NearestNeighbor;
  nn.nn_k = 2;
  TcbsSolver solver(p, nn);
  NodePtr root = solver.make_root();
  auto children = solver.expand(root);
  CHECK(children.size() == 2);
}

TEST_CASE("the search is deterministic") {
  Problem p = load_fixture("corridor.json");
  TcbsSolver first(p);
  SolveResult a = first.solve();
  TcbsSolver second(p);
  SolveResult b = second.solve();
  CHECK(a.solution.total_cost == b.solution.total_cost);
  CHECK(a.assignments == b.assignments);
  CHECK(a.stats.nodes_expanded == b.stats.nodes_expanded);
  CHECK(a.stats.nodes_generated == b.stats.nodes_generated);
  REQUIRE(a.solution.paths.size() == b.solution.paths.size());
  for (size_t j = 0; j < a.solution.paths.size(); ++j) {
    CHECK(a.solution.paths[j].cells == b.solution.paths[j].cells);
  }

  SolverConfig plain;
  plain.dedup = false;
  TcbsSolver third(p, plain);
  CHECK(third.solve().solution.total_cost == a.solution.total_cost);
}

TEST_CASE("the corridor is solved by chaining both tasks onto one agent") {
  Problem p = load_fixture("corridor.json");
  TcbsSolver solver(p);
  SolveResult result = solver.solve();
  CHECK(result.solution.total_cost == 20);
  // One agent hauls both tasks in order; the other stays out of the corridor.
  bool chained = false;
  for (const auto& chain : result.assignments) {
    if (chain.size() == 2) chained = true;
  }
  CHECK(chained);
  CHECK(validate_solution(p, result.solution).ok());
  CHECK(solver.stats().root_h <= result.solution.total_cost);
  CHECK(solver.stats().max_popped_f <= result.solution.total_cost);
}

TEST_CASE("search results match the exhaustive optimum on random boards") {
  for (uint64_t seed = 100; seed < 120; ++seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.width = 5;
    spec.height = 5;
    spec.obstacle_density = 0.1;
    spec.n_agents = 2;
    spec.m_tasks = 2;
    Problem p = gen_scenario(spec);

    long optimum = brute_force_solve(p).solution.total_cost;
    TcbsSolver solver(p);
    SolveResult result = solver.solve();
    CAPTURE(seed);
    CHECK(result.solution.total_cost == optimum);
    CHECK(validate_solution(p, result.solution).ok());
    CHECK(solver.stats().root_h <= optimum);
    CHECK(solver.stats().max_popped_f <= optimum);

    SolverConfig nn;
    nn.mode = SearchMode::NearestNeighbor;
    TcbsSolver nn_solver(p, nn);
    SolveResult nn_result = nn_solver.solve();
    CHECK(nn_result.solution.total_cost >= optimum);
    CHECK(validate_solution(p, nn_result.solution).ok());
  }
}

TEST_CASE("preset chains leave nothing open") {
  Problem p = load_fixture("corridor.json");
  p.initial_assignments = {{0, 1}, {}};
  TcbsSolver solver(p);
  NodePtr root = solver.make_root();
  CHECK(root->h == 0);
  CHECK(root->assignments == p.initial_assignments);
  SolveResult result = solver.solve();
  CHECK(result.solution.total_cost == 20);
  CHECK(result.assignments == p.initial_assignments);
}

TEST_CASE("budgets stop runaway searches") {
  Problem p = load_fixture("corridor.json");
  SolverConfig starved;
  starved.node_budget = 2;
  CHECK_THROWS_AS(TcbsSolver(p, starved).solve(), BudgetError);

  SolverConfig hurried;
  hurried.time_limit_s = 0.0;
  CHECK_THROWS_AS(TcbsSolver(p, hurried).solve(), BudgetError);
}

TEST_CASE("unreachable work is rejected up front") {
  // Three separate islands: the agent, a task start, a task goal.
  GridMap map = parse_map(".#.\n###\n...\n");

  Problem far_start{map, {Cell{0, 0}}, {Task{Cell{0, 2}, Cell{2, 2}}}, {}};
  CHECK_THROWS_AS(TcbsSolver(far_start).solve(), InfeasibleError);

  Problem split_task{map, {Cell{0, 0}}, {Task{Cell{2, 0}, Cell{0, 0}}}, {}};
  CHECK_THROWS_AS(TcbsSolver(split_task).solve(), InfeasibleError);
}

TEST_CASE("independent solvers can run in parallel") {
  Problem p = load_fixture("corridor.json");
  long costs[4] = {0, 0, 0, 0};
  std::vector<std::thread> pool;
  for (int i = 0; i < 4; ++i) {
    pool.emplace_back([&p, &costs, i] {
      TcbsSolver solver(p);
      costs[i] = solver.solve().solution.total_cost;
    });
  }
  for (auto& t : pool) t.join();
  for (long c : costs) CHECK(c == 20);
}

TEST_CASE("solver statistics are filled in") {
  Problem p = load_fixture("corridor.json");
  TcbsSolver solver(p);
  SolveResult result = solver.solve();
  CHECK(result.stats.nodes_expanded > 0);
  CHECK(result.stats.nodes_generated >= result.stats.nodes_expanded);
  CHECK(result.stats.low_level_expansions > 0);
  CHECK(result.stats.wall_ms >= 0.0);
  CHECK(result.stats.root_h > 0);
}
