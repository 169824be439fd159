#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "ctapf/grid_map.hpp"

namespace ctapf {

// A single space-time prohibition for one agent. VertexAvoid forbids standing
// on cell a at the given time; EdgeAvoid forbids the directed move a -> b
// leaving at the given time (occupying a at t and b at t+1).
struct Constraint {
  enum class Kind : uint8_t { VertexAvoid, EdgeAvoid };

  Kind kind = Kind::VertexAvoid;
  Cell a;
  Cell b;  // equals a for VertexAvoid
  int time = 0;

  static Constraint vertex(const Cell& cell, int time) {
    return Constraint{Kind::VertexAvoid, cell, cell, time};
  }
  static Constraint edge(const Cell& from, const Cell& to, int time) {
    return Constraint{Kind::EdgeAvoid, from, to, time};
  }

  bool operator==(const Constraint& o) const {
    return kind == o.kind && a == o.a && b == o.b && time == o.time;
  }
  bool operator<(const Constraint& o) const {
    if (time != o.time) return time < o.time;
    if (kind != o.kind) return kind < o.kind;
    if (!(a == o.a)) return a < o.a;
    return b < o.b;
  }
};

std::ostream& operator<<(std::ostream& os, const Constraint& c);

struct WaypointArrival {
  int waypoint = 0;  // index into the waypoint list given to the planner
  int time = 0;      // first time the waypoint cell is reached on its leg

  bool operator==(const WaypointArrival& o) const {
    return waypoint == o.waypoint && time == o.time;
  }
};

// One agent's trajectory. cells[t] is the position at time t; after the last
// entry the agent rests on the final cell. Arrival times record when each
// waypoint was first reached; the path may continue past the last arrival
// when constraints force the agent to vacate its goal and return.
struct Path {
  std::vector<Cell> cells;
  std::vector<WaypointArrival> waypoint_arrivals;

  int final_time() const { return int(cells.size()) - 1; }
  const Cell& position(int t) const {
    return cells[size_t(t) < cells.size() ? t : cells.size() - 1];
  }
};

// Extends every path to the longest one by repeating its final cell, so all
// paths share one time horizon. Arrival times are untouched.
void pad_paths(std::vector<Path>& paths);

// Space-time single-agent planner. Plans through an ordered waypoint list leg
// by leg; each leg is an A* over (cell, time) with waiting allowed, optimal
// for that leg's arrival time. Keeps a per-instance result cache and feeds
// unconstrained leg lengths into the shared distance memo. One instance per
// solver; not thread-safe.
class SpacetimePlanner {
 public:
  SpacetimePlanner(const GridMap& map, DistanceMemo& memo)
      : map_(&map), memo_(&memo) {}

  // Plans start -> waypoints[0] -> ... -> waypoints.back() honoring every
  // constraint. The returned path ends on the last waypoint (or start when
  // waypoints is empty) and is safe to rest on afterwards. Throws
  // UnreachableError when some leg has no route at all, InfeasibleError when
  // constraints exclude every route within the time horizon.
  Path plan(const Cell& start, const std::vector<Cell>& waypoints,
            const std::vector<Constraint>& constraints);

  long expansions() const { return expansions_; }
  size_t cache_size() const { return cache_.size(); }

 private:
  struct CacheEntry {
    int status = 0;  // 0 ok, 1 unreachable, 2 infeasible
    Path path;
  };

  Path plan_uncached(const Cell& start, const std::vector<Cell>& waypoints,
                     const std::vector<Constraint>& constraints);

  const GridMap* map_;
  DistanceMemo* memo_;
  long expansions_ = 0;
  std::unordered_map<std::string, CacheEntry> cache_;
};

}  // namespace ctapf

namespace std {
template <>
struct hash<ctapf::Constraint> {
  size_t operator()(const ctapf::Constraint& c) const {
    size_t h = std::hash<int>()(int(c.kind));
    h = ctapf::hash_combine(h, std::hash<ctapf::Cell>()(c.a));
    h = ctapf::hash_combine(h, std::hash<ctapf::Cell>()(c.b));
    return ctapf::hash_combine(h, std::hash<int>()(c.time));
  }
};
}  // namespace std
