#include <doctest.h>

#include <random>

#include "ctapf/problem.hpp"
#include "ctapf/spacetime.hpp"
#include "ctapf/validator.hpp"

using namespace ctapf;

namespace {

Path path_of(std::initializer_list<Cell> cells) {
  Path p;
  p.cells = cells;
  return p;
}

// Straightforward re-scan of the collision rules, kept separate from the
// library's sweep on purpose.
std::vector<Conflict> naive_conflicts(const std::vector<Path>& paths) {
  std::vector<Conflict> out;
  int n = int(paths.size());
  int len = n ? int(paths[0].cells.size()) : 0;
  for (int t = 0; t < len; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Cell& ai = paths[i].cells[t];
        const Cell& aj = paths[j].cells[t];
        if (ai == aj) {
          out.push_back(Conflict{Conflict::Kind::Vertex, i, j, t, ai, ai});
        }
        if (t + 1 < len) {
          const Cell& bi = paths[i].cells[t + 1];
          const Cell& bj = paths[j].cells[t + 1];
          if (ai == bj && bi == aj && !(ai == bi)) {
            out.push_back(Conflict{Conflict::Kind::Edge, i, j, t, ai, bi});
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

}  // namespace

TEST_CASE("problem validation") {
  GridMap map = parse_map("...\n.#.\n");
  Problem p{map, {Cell{0, 0}}, {Task{Cell{1, 0}, Cell{2, 0}}}, {}};
  CHECK_NOTHROW(validate_problem(p));

  Problem no_agents{map, {}, {}, {}};
  CHECK_THROWS_AS(validate_problem(no_agents), FormatError);

  Problem on_wall{map, {Cell{1, 1}}, {}, {}};
  CHECK_THROWS_AS(validate_problem(on_wall), FormatError);

  Problem twice{map, {Cell{0, 0}, Cell{0, 0}}, {}, {}};
  CHECK_THROWS_AS(validate_problem(twice), FormatError);

  Problem bad_task{map, {Cell{0, 0}}, {Task{Cell{1, 1}, Cell{2, 0}}}, {}};
  CHECK_THROWS_AS(validate_problem(bad_task), FormatError);

  Problem loop_task{map, {Cell{0, 0}}, {Task{Cell{2, 0}, Cell{2, 0}}}, {}};
  CHECK_THROWS_AS(validate_problem(loop_task), FormatError);

  Problem bad_preset = p;
  bad_preset.initial_assignments = {{3}};
  CHECK_THROWS_AS(validate_problem(bad_preset), FormatError);

  Problem dup_preset{map,
                     {Cell{0, 0}, Cell{2, 0}},
                     {Task{Cell{1, 0}, Cell{0, 1}}},
                     {{0}, {0}}};
  CHECK_THROWS_AS(validate_problem(dup_preset), FormatError);

  Problem short_preset = p;
  short_preset.initial_assignments = {};  // fine: empty means open
  CHECK_NOTHROW(validate_problem(short_preset));
}

TEST_CASE("meeting on a cell is a vertex conflict") {
  std::vector<Path> paths{path_of({Cell{0, 0}, Cell{1, 0}}),
                          path_of({Cell{2, 0}, Cell{1, 0}})};
  auto conflicts = detect_conflicts(paths);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0] ==
        Conflict{Conflict::Kind::Vertex, 0, 1, 1, Cell{1, 0}, Cell{1, 0}});
}

TEST_CASE("swapping cells is an edge conflict") {
  std::vector<Path> paths{path_of({Cell{0, 0}, Cell{1, 0}}),
                          path_of({Cell{1, 0}, Cell{0, 0}})};
  auto conflicts = detect_conflicts(paths);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0] ==
        Conflict{Conflict::Kind::Edge, 0, 1, 0, Cell{0, 0}, Cell{1, 0}});
}

TEST_CASE("parked agents keep occupying their final cell") {
  std::vector<Path> paths{
      path_of({Cell{0, 0}, Cell{1, 0}, Cell{2, 0}}),
      path_of({Cell{2, 0}, Cell{2, 0}, Cell{2, 0}})};  // parked from the start
  auto conflicts = detect_conflicts(paths);
  REQUIRE(conflicts.size() == 1);
  CHECK(conflicts[0].kind == Conflict::Kind::Vertex);
  CHECK(conflicts[0].time == 2);
}

TEST_CASE("two agents waiting together clash once per step, never by edge") {
  std::vector<Path> paths{path_of({Cell{1, 0}, Cell{1, 0}}),
                          path_of({Cell{1, 0}, Cell{1, 0}})};
  auto conflicts = detect_conflicts(paths);
  REQUIRE(conflicts.size() == 2);
  CHECK(conflicts[0].kind == Conflict::Kind::Vertex);
  CHECK(conflicts[0].time == 0);
  CHECK(conflicts[1].kind == Conflict::Kind::Vertex);
  CHECK(conflicts[1].time == 1);
}

TEST_CASE("conflicts come out ordered by time") {
  std::vector<Path> paths{
      path_of({Cell{0, 0}, Cell{1, 0}, Cell{1, 1}}),
      path_of({Cell{2, 0}, Cell{1, 0}, Cell{1, 1}}),   // meets 0 at t=1 and t=2
      path_of({Cell{0, 1}, Cell{0, 0}, Cell{0, 1}})};
  auto conflicts = detect_conflicts(paths);
  REQUIRE(conflicts.size() >= 2);
  for (size_t i = 1; i < conflicts.size(); ++i) {
    CHECK(conflicts[i - 1].time <= conflicts[i].time);
  }
  CHECK(conflicts[0].agent_a < conflicts[0].agent_b);
}

TEST_CASE("conflict scan demands equal lengths") {
  std::vector<Path> paths{path_of({Cell{0, 0}, Cell{1, 0}}),
                          path_of({Cell{2, 0}})};
  CHECK_THROWS_AS(detect_conflicts(paths), ContractError);
  std::vector<Path> with_empty{path_of({Cell{0, 0}}), Path{}};
  CHECK_THROWS_AS(detect_conflicts(with_empty), ContractError);
}

TEST_CASE("conflict scan agrees with a naive rescan on random walks") {
  std::mt19937 rng(11);
  GridMap map = parse_map(".....\n.....\n.....\n.....\n.....\n");
  for (int round = 0; round < 200; ++round) {
    std::vector<Path> paths;
    int n = 2 + int(rng() % 3);
    for (int j = 0; j < n; ++j) {
      Path p;
      Cell cur{int(rng() % 5), int(rng() % 5)};
      p.cells.push_back(cur);
      for (int t = 0; t < 8; ++t) {
        std::vector<Cell> moves{cur};
        for (const Cell& nb : neighbors(map, cur)) moves.push_back(nb);
        cur = moves[rng() % moves.size()];
        p.cells.push_back(cur);
      }
      paths.push_back(std::move(p));
    }
    CHECK(detect_conflicts(paths) == naive_conflicts(paths));
  }
}

TEST_CASE("a path picks up and delivers") {
  std::vector<Task> tasks{Task{Cell{1, 0}, Cell{3, 0}}};
  std::vector<Cell> cells{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}};
  auto events = scan_path_tasks(cells, tasks);
  REQUIRE(events.size() == 1);
  CHECK(events[0].task == 0);
  CHECK(events[0].start_time == 1);
  CHECK(events[0].completion_time == 3);
  CHECK(implicit_assignment(cells, tasks) == std::vector<int>{0});
}

TEST_CASE("delivering on another task's start chains them in one step") {
  std::vector<Task> tasks{Task{Cell{0, 0}, Cell{2, 0}}, Task{Cell{2, 0}, Cell{4, 0}}};
  std::vector<Cell> cells{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}, Cell{4, 0}};
  auto events = scan_path_tasks(cells, tasks);
  REQUIRE(events.size() == 2);
  CHECK(events[0].task == 0);
  CHECK(events[0].start_time == 0);
  CHECK(events[0].completion_time == 2);
  CHECK(events[1].task == 1);
  CHECK(events[1].start_time == 2);  // same step as the delivery above
  CHECK(events[1].completion_time == 4);
}

TEST_CASE("a busy agent crosses start cells without binding") {
  std::vector<Task> tasks{Task{Cell{0, 0}, Cell{3, 0}}, Task{Cell{1, 0}, Cell{0, 1}}};
  std::vector<Cell> cells{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}};
  auto events = scan_path_tasks(cells, tasks);
  REQUIRE(events.size() == 1);  // crossing (1,0) while carrying task 0 is free
  CHECK(events[0].task == 0);
}

TEST_CASE("two pending tasks on one start cell are ambiguous") {
  std::vector<Task> tasks{Task{Cell{1, 0}, Cell{2, 0}}, Task{Cell{1, 0}, Cell{3, 0}}};
  std::vector<Cell> cells{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}};
  CHECK_THROWS_AS(scan_path_tasks(cells, tasks), AmbiguityError);
}

TEST_CASE("the delivery-backed scan ignores mere crossings") {
  std::vector<Task> tasks{Task{Cell{1, 0}, Cell{5, 0}}};
  std::vector<Cell> crossing{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}};
  // Literal reading: the crossing binds and the task is left running.
  auto literal = scan_path_tasks(crossing, tasks);
  REQUIRE(literal.size() == 1);
  CHECK(literal[0].completion_time == -1);
  // Delivery-backed reading: never bound at all.
  CHECK(scan_path_tasks_completed(crossing, tasks).empty());

  std::vector<Cell> serving{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0},
                            Cell{4, 0}, Cell{5, 0}};
  auto completed = scan_path_tasks_completed(serving, tasks);
  REQUIRE(completed.size() == 1);
  CHECK(completed[0].completion_time == 5);
}

TEST_CASE("one agent can chain two corridor deliveries") {
  GridMap map = parse_map("................\n");
  DistanceMemo memo(map);
  SpacetimePlanner planner(map, memo);
  std::vector<Task> tasks{Task{Cell{2, 0}, Cell{6, 0}}, Task{Cell{8, 0}, Cell{15, 0}}};
  Path p = planner.plan(Cell{0, 0},
                        {tasks[0].start, tasks[0].goal, tasks[1].start, tasks[1].goal},
                        {});
  auto events = scan_path_tasks(p.cells, tasks);
  REQUIRE(events.size() == 2);
  CHECK(events[0].completion_time == 6);
  CHECK(events[1].completion_time == 15);

  CostBreakdown cost = solution_cost({p}, tasks, {{0, 1}});
  CHECK(cost.completion == std::vector<int>{6, 15});
  CHECK(cost.total == 21);

  Solution solution = build_solution({p}, tasks, {{0, 1}});
  CHECK(solution.total_cost == 21);
  CHECK(solution.task_completion == std::vector<int>{6, 15});
  CHECK(solution.horizon == 15);
}

TEST_CASE("solution cost rejects inconsistent bookkeeping") {
  std::vector<Task> tasks{Task{Cell{1, 0}, Cell{2, 0}}};
  Path p = path_of({Cell{0, 0}, Cell{1, 0}, Cell{2, 0}});
  p.waypoint_arrivals = {WaypointArrival{0, 1}, WaypointArrival{1, 2}};

  CHECK_THROWS_AS(solution_cost({p}, tasks, {}), ContractError);       // agent count
  CHECK_THROWS_AS(solution_cost({p}, tasks, {{}}), ContractError);     // arrival count
  CHECK_THROWS_AS(solution_cost({p}, tasks, {{5}}), ContractError);    // unknown task
  CHECK_NOTHROW(solution_cost({p}, tasks, {{0}}));

  Path q = p;
  q.waypoint_arrivals = {};
  CHECK_THROWS_AS(solution_cost({p, q}, tasks, {{0}, {0}}), ContractError);  // missing

  std::vector<Task> two{Task{Cell{1, 0}, Cell{2, 0}}, Task{Cell{2, 0}, Cell{0, 0}}};
  CHECK_THROWS_AS(solution_cost({p}, two, {{0}}), ContractError);  // task 1 unassigned

  Path twice = p;
  twice.waypoint_arrivals = {WaypointArrival{0, 1}, WaypointArrival{1, 2},
                             WaypointArrival{2, 3}, WaypointArrival{3, 4}};
  CHECK_THROWS_AS(solution_cost({twice}, tasks, {{0, 0}}), ContractError);  // dup
}

// --- validator ------------------------------------------------------------

namespace {

Problem tiny_problem() {
  return Problem{parse_map(".....\n.....\n"),
                 {Cell{0, 0}, Cell{4, 0}},
                 {Task{Cell{1, 0}, Cell{3, 0}}, Task{Cell{3, 1}, Cell{0, 1}}},
                 {}};
}

Solution hand_solution(std::vector<std::vector<Cell>> cells,
                       std::vector<int> completion, long total) {
  Solution s;
  for (auto& path : cells) {
    Path p;
    p.cells = std::move(path);
    s.paths.push_back(std::move(p));
  }
  s.task_completion = std::move(completion);
  s.total_cost = total;
  if (!s.paths.empty()) s.horizon = s.paths[0].final_time();
  return s;
}

bool has_kind(const ValidationReport& report, Violation::Kind kind) {
  for (const Violation& v : report.violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("validator accepts a clean solution") {
  Problem p = tiny_problem();
  Solution s = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}, Cell{3, 0}},
       {Cell{4, 0}, Cell{4, 1}, Cell{3, 1}, Cell{2, 1}, Cell{1, 1}, Cell{0, 1}}},
      {3, 5}, 8);
  // Padding by hand: equal lengths required.
  s.paths[0].cells.push_back(Cell{3, 0});
  CHECK(validate_solution(p, s).ok());
}

TEST_CASE("validator flags shape and start problems") {
  Problem p = tiny_problem();
  Solution wrong_count = hand_solution({{Cell{0, 0}}}, {0, 0}, 0);
  CHECK(has_kind(validate_solution(p, wrong_count), Violation::Kind::PathShape));

  Solution ragged = hand_solution({{Cell{0, 0}, Cell{1, 0}}, {Cell{4, 0}}}, {0, 0}, 0);
  CHECK(has_kind(validate_solution(p, ragged), Violation::Kind::PathShape));

  Solution bad_start = hand_solution({{Cell{1, 0}}, {Cell{4, 0}}}, {0, 0}, 0);
  CHECK(has_kind(validate_solution(p, bad_start), Violation::Kind::BadStart));
}

TEST_CASE("validator flags teleports and blocked cells") {
  Problem p{parse_map("..#..\n.....\n"),
            {Cell{0, 0}, Cell{4, 0}},
            {Task{Cell{1, 0}, Cell{1, 1}}},
            {}};
  Solution teleport = hand_solution(
      {{Cell{0, 0}, Cell{3, 0}}, {Cell{4, 0}, Cell{4, 0}}}, {1}, 1);
  CHECK(has_kind(validate_solution(p, teleport), Violation::Kind::BadStep));

  Solution through_wall = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}}, {Cell{4, 0}, Cell{4, 0}, Cell{4, 0}}},
      {1}, 1);
  CHECK(has_kind(validate_solution(p, through_wall), Violation::Kind::BadStep));
}

TEST_CASE("validator flags collisions") {
  Problem p = tiny_problem();
  Solution meet = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}},
       {Cell{4, 0}, Cell{3, 0}, Cell{2, 0}, Cell{2, 0}}},
      {3, -1}, 0);
  CHECK(has_kind(validate_solution(p, meet), Violation::Kind::VertexClash));

  Solution swap = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}},
       {Cell{4, 0}, Cell{3, 0}, Cell{3, 0}, Cell{2, 0}}},
      {3, -1}, 0);
  // Agent 0 moves 2->3 across the same edge agent 1 crosses 3->2.
  CHECK(has_kind(validate_solution(p, swap), Violation::Kind::EdgeClash));
}

TEST_CASE("validator tracks delivery coverage") {
  Problem p = tiny_problem();
  Solution idle = hand_solution({{Cell{0, 0}}, {Cell{4, 0}}}, {0, 0}, 0);
  auto report = validate_solution(p, idle);
  CHECK(has_kind(report, Violation::Kind::UnfulfilledTask));

  // Agent 1 also walks task 0's start and goal, but the recorded time names
  // agent 0 as the deliverer: mere wandering under the default reading, a
  // second delivery under the literal crossing rule.
  Problem solo{parse_map(".....\n.....\n"),
               {Cell{0, 0}, Cell{4, 0}},
               {Task{Cell{1, 0}, Cell{3, 0}}},
               {}};
  Solution doubled = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}, Cell{4, 0}, Cell{4, 0},
        Cell{4, 0}, Cell{4, 0}},
       {Cell{4, 0}, Cell{4, 1}, Cell{3, 1}, Cell{2, 1}, Cell{1, 1}, Cell{1, 0},
        Cell{2, 0}, Cell{3, 0}}},
      {3}, 3);
  CHECK(validate_solution(solo, doubled).ok());
  auto doubled_report = validate_solution(solo, doubled, true);
  CHECK(has_kind(doubled_report, Violation::Kind::DoubleFulfilledTask));

  // Two paths can only realize the same recorded time by standing on the
  // goal together, which is a clash of its own.
  Problem pair{parse_map(".....\n"),
               {Cell{0, 0}, Cell{2, 0}},
               {Task{Cell{1, 0}, Cell{3, 0}}},
               {}};
  Solution pile = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}},
       {Cell{2, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}}},
      {3}, 3);
  auto pile_report = validate_solution(pair, pile);
  CHECK(has_kind(pile_report, Violation::Kind::DoubleFulfilledTask));
  CHECK(has_kind(pile_report, Violation::Kind::VertexClash));
}

TEST_CASE("shared start cells: claims must fit, literal reading is ambiguous") {
  Problem p{parse_map(".....\n"),
            {Cell{0, 0}},
            {Task{Cell{1, 0}, Cell{2, 0}}, Task{Cell{1, 0}, Cell{3, 0}}},
            {}};

  // One touch of the shared start cannot explain two deliveries.
  Solution once = hand_solution({{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}}},
                                {2, 3}, 5);
  CHECK(has_kind(validate_solution(p, once), Violation::Kind::CostMismatch));
  CHECK(has_kind(validate_solution(p, once, true), Violation::Kind::AmbiguousStart));

  // Returning to the start makes the chain coherent; the literal rule still
  // cannot tell which task the first visit picked up.
  Solution twice = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}}},
      {2, 5}, 7);
  CHECK(validate_solution(p, twice).ok());
  CHECK(has_kind(validate_solution(p, twice, true), Violation::Kind::AmbiguousStart));
}

TEST_CASE("strict mode rejects incidental crossings the relaxed mode allows") {
  Problem q{parse_map(".....\n.....\n"),
            {Cell{0, 0}, Cell{4, 0}},
            {Task{Cell{1, 0}, Cell{3, 0}}},
            {}};
  // Agent 1 keeps to row 1: fine under both readings.
  Solution clean = hand_solution(
      {{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}, Cell{3, 0}, Cell{3, 0}},
       {Cell{4, 0}, Cell{4, 1}, Cell{3, 1}, Cell{2, 1}, Cell{1, 1}, Cell{1, 1}}},
      {3}, 3);
  CHECK(validate_solution(q, clean).ok());
  CHECK(validate_solution(q, clean, true).ok());

  // Same trip, but agent 1 ends by stepping onto the start cell (1,0) long
  // after agent 0 delivered the task.
  Solution stroll = clean;
  stroll.paths[1].cells = {Cell{4, 0}, Cell{4, 1}, Cell{3, 1}, Cell{2, 1},
                           Cell{1, 1}, Cell{1, 0}};
  CHECK(validate_solution(q, stroll).ok());
  auto strict_report = validate_solution(q, stroll, true);
  CHECK_FALSE(strict_report.ok());
  CHECK(has_kind(strict_report, Violation::Kind::IncidentalBinding));
}

TEST_CASE("validator checks the recorded numbers") {
  Problem q{parse_map(".....\n"),
            {Cell{0, 0}},
            {Task{Cell{1, 0}, Cell{3, 0}}},
            {}};
  Solution good = hand_solution({{Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{3, 0}}},
                                {3}, 3);
  CHECK(validate_solution(q, good).ok());

  Solution wrong_when = good;
  wrong_when.task_completion = {2};
  CHECK(has_kind(validate_solution(q, wrong_when), Violation::Kind::CostMismatch));

  Solution wrong_total = good;
  wrong_total.total_cost = 4;
  CHECK(has_kind(validate_solution(q, wrong_total), Violation::Kind::CostMismatch));

  Solution wrong_count = good;
  wrong_count.task_completion = {3, 7};
  CHECK(has_kind(validate_solution(q, wrong_count), Violation::Kind::CostMismatch));
}
