#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctapf/baselines.hpp"
#include "ctapf/bench.hpp"
#include "ctapf/errors.hpp"
#include "ctapf/oracle.hpp"
#include "ctapf/scenario.hpp"
#include "ctapf/tcbs.hpp"
#include "ctapf/validator.hpp"

namespace {

using namespace ctapf;

constexpr int kOk = 0;
constexpr int kFailed = 1;  // infeasible, timeout, invalid solution, I/O
constexpr int kUsage = 2;   // bad flags or malformed input files

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("cannot write " + path);
}

// Replaces the map described in the JSON with one read from text form; every
// other field must still fit on it.
Problem apply_map_file(Problem problem, const std::string& map_path) {
  GridMap map = parse_map(read_file(map_path));
  Problem swapped{std::move(map), std::move(problem.agent_starts),
                  std::move(problem.tasks),
                  std::move(problem.initial_assignments)};
  validate_problem(swapped);
  return swapped;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ',')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

struct SolveFlags {
  std::string solver = "tcbs";
  std::string in;
  std::string out;
  std::string map_file;
  double time_limit_s = 60.0;
  long node_budget = 2'000'000;
};

int run_solve(const SolveFlags& flags) {
  Problem problem = problem_from_json(read_file(flags.in));
  if (!flags.map_file.empty()) problem = apply_map_file(std::move(problem), flags.map_file);

  SolverConfig scfg;
  scfg.time_limit_s = flags.time_limit_s;
  scfg.node_budget = flags.node_budget;

  Solution solution;
  long expanded = 0;
  if (flags.solver == "tcbs") {
    TcbsSolver solver(problem, scfg);
    SolveResult r = solver.solve();
    solution = std::move(r.solution);
    expanded = r.stats.nodes_expanded;
  } else if (flags.solver == "tcbs-nn2") {
    scfg.mode = SearchMode::NearestNeighbor;
    TcbsSolver solver(problem, scfg);
    SolveResult r = solver.solve();
    solution = std::move(r.solution);
    expanded = r.stats.nodes_expanded;
  } else if (flags.solver == "greedy") {
    SolveResult r = solve_greedy(problem, scfg);
    solution = std::move(r.solution);
    expanded = r.stats.nodes_expanded;
  } else if (flags.solver == "decoupled") {
    SolveResult r = solve_decoupled(problem, scfg);
    solution = std::move(r.solution);
    expanded = r.stats.nodes_expanded;
  } else if (flags.solver == "oracle") {
    OracleResult r = brute_force_solve(problem);
    solution = std::move(r.solution);
    expanded = r.expanded;
  } else {
    std::cerr << "unknown solver: " << flags.solver << '\n';
    return kUsage;
  }

  write_output(flags.out, solution_to_json(solution));
  std::cerr << flags.solver << ": cost " << solution.total_cost << ", "
            << expanded << " nodes\n";
  return kOk;
}

struct ValidateFlags {
  std::string scenario;
  std::string solution;
  std::string map_file;
  bool strict = false;
};

int run_validate(const ValidateFlags& flags) {
  Problem problem = problem_from_json(read_file(flags.scenario));
  if (!flags.map_file.empty()) problem = apply_map_file(std::move(problem), flags.map_file);
  Solution solution = solution_from_json(read_file(flags.solution));

  ValidationReport report = validate_solution(problem, solution, flags.strict);
  if (report.ok()) {
    std::cout << "valid\n";
    return kOk;
  }
  for (const Violation& v : report.violations) {
    std::cout << violation_kind_name(v.kind) << ": " << v.detail << '\n';
  }
  return kFailed;
}

struct GenFlags {
  ScenarioSpec spec;
  std::string out;
};

int run_gen(const GenFlags& flags) {
  Problem problem = gen_scenario(flags.spec);
  write_output(flags.out, problem_to_json(problem));
  return kOk;
}

struct BenchFlags {
  uint64_t seed_start = 1;
  int scenarios = 30;
  int width = 8;
  int height = 8;
  double density = 0.2;
  int agents = 3;
  std::string tasks = "2,3";
  std::string solvers = "tcbs,tcbs-nn2,greedy,decoupled";
  std::string out = "bench.csv";
  double time_limit_s = 60.0;
  long node_budget = 2'000'000;
  long oracle_budget = 20'000'000;
  int jobs = 1;
};

int run_bench(const BenchFlags& flags) {
  std::vector<ScenarioSpec> specs;
  for (const std::string& part : split_list(flags.tasks)) {
    int m = std::stoi(part);
    for (int k = 0; k < flags.scenarios; ++k) {
      ScenarioSpec spec;
      spec.seed = flags.seed_start + uint64_t(k);
      spec.width = flags.width;
      spec.height = flags.height;
      spec.obstacle_density = flags.density;
      spec.n_agents = flags.agents;
      spec.m_tasks = m;
      specs.push_back(spec);
    }
  }

  BenchConfig config;
  config.solvers = split_list(flags.solvers);
  config.time_limit_s = flags.time_limit_s;
  config.node_budget = flags.node_budget;
  config.oracle_state_budget = flags.oracle_budget;
  config.jobs = flags.jobs;

  BenchResult result = run_benchmark(specs, config);
  write_output(flags.out, records_to_csv(result.records));
  for (const std::string& flag : result.flags) std::cerr << flag << '\n';
  std::cout << summarize(result.records);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Combined task allocation and path finding toolkit"};
  app.require_subcommand(1);

  GenFlags gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "Write a random scenario as JSON");
  cmd_gen->add_option("--seed", gen.spec.seed, "Random seed");
  cmd_gen->add_option("--width", gen.spec.width, "Map width");
  cmd_gen->add_option("--height", gen.spec.height, "Map height");
  cmd_gen->add_option("--density", gen.spec.obstacle_density, "Obstacle fraction");
  cmd_gen->add_option("--agents", gen.spec.n_agents, "Number of agents");
  cmd_gen->add_option("--tasks", gen.spec.m_tasks, "Number of tasks");
  cmd_gen->add_option("--out", gen.out, "Output file (default stdout)");

  SolveFlags solve;
  CLI::App* cmd_solve = app.add_subcommand("solve", "Solve a scenario JSON");
  cmd_solve->add_option("--solver", solve.solver,
                        "tcbs | tcbs-nn2 | greedy | decoupled | oracle");
  cmd_solve->add_option("--in", solve.in, "Scenario JSON")->required();
  cmd_solve->add_option("--out", solve.out, "Solution JSON (default stdout)");
  cmd_solve->add_option("--map-file", solve.map_file,
                        "Replace the scenario map with this text-format map");
  cmd_solve->add_option("--time-limit", solve.time_limit_s, "Seconds per solve");
  cmd_solve->add_option("--node-budget", solve.node_budget, "Search node budget");

  ValidateFlags validate;
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "Check a solution against a scenario");
  cmd_validate->add_option("--scenario", validate.scenario, "Scenario JSON")
      ->required();
  cmd_validate->add_option("--solution", validate.solution, "Solution JSON")
      ->required();
  cmd_validate->add_option("--map-file", validate.map_file,
                           "Replace the scenario map with this text-format map");
  cmd_validate->add_flag("--strict", validate.strict,
                         "Also flag incidental task pickups along the paths");

  BenchFlags bench;
  CLI::App* cmd_bench = app.add_subcommand("bench", "Run the regret benchmark");
  cmd_bench->add_option("--seed-start", bench.seed_start, "First scenario seed");
  cmd_bench->add_option("--scenarios", bench.scenarios, "Seeds per task count");
  cmd_bench->add_option("--width", bench.width, "Map width");
  cmd_bench->add_option("--height", bench.height, "Map height");
  cmd_bench->add_option("--density", bench.density, "Obstacle fraction");
  cmd_bench->add_option("--agents", bench.agents, "Number of agents");
  cmd_bench->add_option("--tasks", bench.tasks, "Comma list of task counts");
  cmd_bench->add_option("--solvers", bench.solvers, "Comma list of solvers");
  cmd_bench->add_option("--out", bench.out, "CSV output path");
  cmd_bench->add_option("--time-limit", bench.time_limit_s, "Seconds per cell");
  cmd_bench->add_option("--node-budget", bench.node_budget, "Search node budget");
  cmd_bench->add_option("--oracle-budget", bench.oracle_budget,
                        "Max joint states for the exhaustive reference");
  cmd_bench->add_option("--jobs", bench.jobs, "Parallel scenario workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_solve->parsed()) return run_solve(solve);
    if (cmd_validate->parsed()) return run_validate(validate);
    if (cmd_bench->parsed()) return run_bench(bench);
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
