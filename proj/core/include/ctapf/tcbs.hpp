#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctapf/problem.hpp"
#include "ctapf/spacetime.hpp"

namespace ctapf {

enum class SearchMode {
  Optimal,          // full best-first over assignment + conflict branches
  NearestNeighbor,  // keep only the nn_k cheapest assignment children, weighted f
};

struct SolverConfig {
  SearchMode mode = SearchMode::Optimal;
  int nn_k = 2;            // assignment children kept per expansion in NN mode
  double h_weight = 1.2;   // inflation applied to h in NN mode only
  long node_budget = 2'000'000;
  double time_limit_s = 60.0;
  bool dedup = true;       // drop re-derived nodes with identical chains+constraints
};

struct SearchStats {
  long nodes_expanded = 0;
  long nodes_generated = 0;
  long low_level_expansions = 0;
  double wall_ms = 0.0;
  long root_h = 0;
  long max_popped_f = 0;  // max g+h over popped nodes; admissibility probe
};

// One high-level search node: per-agent ordered task chains, per-agent
// accumulated constraints, and the paths planned under both.
struct SearchNode {
  std::vector<std::vector<int>> assignments;      // task ids, service order
  std::vector<std::vector<Constraint>> avoid;     // per agent
  std::vector<Path> paths;                        // natural (unpadded) lengths
  long g = 0;                                     // sum of delivery times so far
  long h = 0;                                     // bound on the unassigned rest
  std::optional<Conflict> conflict;               // earliest clash, if any
  std::shared_ptr<const SearchNode> parent;
  int added_agent = -1;  // which branch produced this node
  int added_task = -1;   // assignment branches only
};

using NodePtr = std::shared_ptr<const SearchNode>;

struct SolveResult {
  Solution solution;
  std::vector<std::vector<int>> assignments;
  SearchStats stats;
};

// Best-first search that settles who does what and how to route them in one
// tree.  Nodes with clashing paths branch into the two one-sided constraint
// children; clash-free nodes with spare tasks branch over every (task, agent)
// append; a clash-free node with everything assigned is a solution.
// Problems may arrive with preset chains, which turns the whole search into
// plain constraint branching over fixed assignments.
class TcbsSolver {
 public:
  explicit TcbsSolver(const Problem& problem, SolverConfig config = {});

  SolveResult solve();

  // Exposed pieces of the search, usable on their own.
  NodePtr make_root();
  std::vector<NodePtr> expand(const NodePtr& node);

  const SearchStats& stats() const { return stats_; }
  DistanceMemo& memo() { return memo_; }

 private:
  Path plan_agent(int agent, const std::vector<int>& chain,
                  const std::vector<Constraint>& constraints);
  long partial_cost(const SearchNode& node) const;
  long heuristic(const SearchNode& node);
  void finish_node(SearchNode& node);
  std::string canonical_key(const SearchNode& node) const;

  const Problem& problem_;
  SolverConfig config_;
  DistanceMemo memo_;
  SpacetimePlanner planner_;
  SearchStats stats_;
};

}  // namespace ctapf
