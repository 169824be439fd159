#include "ctapf/spacetime.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

namespace ctapf {

std::ostream& operator<<(std::ostream& os, const Constraint& c) {
  if (c.kind == Constraint::Kind::VertexAvoid) {
    return os << "vertex" << c.a << "@" << c.time;
  }
  return os << "edge" << c.a << "->" << c.b << "@" << c.time;
}

void pad_paths(std::vector<Path>& paths) {
  size_t longest = 1;
  for (const Path& p : paths) longest = std::max(longest, p.cells.size());
  for (Path& p : paths) {
    if (p.cells.empty()) continue;
    p.cells.resize(longest, p.cells.back());
  }
}

namespace {

// Lookup tables for one plan call.
struct ConstraintIndex {
  std::unordered_set<int64_t> vertex;           // cell index * stride + time
  std::unordered_set<int64_t> edge;             // (from, to) pair * stride + time
  std::unordered_map<int, int> last_vertex_at;  // cell index -> latest time

  ConstraintIndex(const GridMap& map, const std::vector<Constraint>& cs)
      : stride_(map.area()) {
    for (const Constraint& c : cs) {
      if (c.kind == Constraint::Kind::VertexAvoid) {
        vertex.insert(int64_t(map.index(c.a)) + int64_t(c.time) * stride_);
        auto [it, fresh] = last_vertex_at.emplace(map.index(c.a), c.time);
        if (!fresh) it->second = std::max(it->second, c.time);
      } else {
        edge.insert((int64_t(map.index(c.a)) * stride_ + map.index(c.b)) +
                    int64_t(c.time) * stride_ * stride_);
      }
    }
  }

  bool vertex_blocked(int cell, int time) const {
    return vertex.count(int64_t(cell) + int64_t(time) * stride_) != 0;
  }
  bool edge_blocked(int from, int to, int time) const {
    return edge.count(int64_t(from) * stride_ + to +
                      int64_t(time) * stride_ * stride_) != 0;
  }
  int last_vertex_time(int cell) const {
    auto it = last_vertex_at.find(cell);
    return it == last_vertex_at.end() ? -1 : it->second;
  }

 private:
  int64_t stride_;
};

std::string cache_key(const GridMap& map, const Cell& start,
                      const std::vector<Cell>& waypoints,
                      std::vector<Constraint> constraints) {
  std::sort(constraints.begin(), constraints.end());
  std::ostringstream ss;
  ss << map.index(start);
  for (const Cell& w : waypoints) ss << "," << map.index(w);
  for (const Constraint& c : constraints) {
    ss << ";" << int(c.kind) << ":" << map.index(c.a) << ":" << map.index(c.b)
       << ":" << c.time;
  }
  return ss.str();
}

struct OpenState {
  int f;
  int time;
  Cell cell;
};

struct OpenOrder {
  // Min-queue on f, then lower time, then lower y, then lower x.
  bool operator()(const OpenState& a, const OpenState& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.time != b.time) return a.time > b.time;
    if (a.cell.y != b.cell.y) return a.cell.y > b.cell.y;
    return a.cell.x > b.cell.x;
  }
};

}  // namespace

Path SpacetimePlanner::plan(const Cell& start, const std::vector<Cell>& waypoints,
                            const std::vector<Constraint>& constraints) {
  std::string key = cache_key(*map_, start, waypoints, constraints);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    CacheEntry entry;
    try {
      entry.path = plan_uncached(start, waypoints, constraints);
    } catch (const UnreachableError&) {
      entry.status = 1;
      cache_.emplace(std::move(key), std::move(entry));
      throw;
    } catch (const InfeasibleError&) {
      entry.status = 2;
      cache_.emplace(std::move(key), std::move(entry));
      throw;
    }
    it = cache_.emplace(std::move(key), std::move(entry)).first;
  }
  if (it->second.status == 1) throw UnreachableError("no route (cached)");
  if (it->second.status == 2) throw InfeasibleError("constrained out (cached)");
  return it->second.path;
}

Path SpacetimePlanner::plan_uncached(const Cell& start,
                                     const std::vector<Cell>& waypoints,
                                     const std::vector<Constraint>& constraints) {
  if (!map_->is_free(start)) {
    std::ostringstream ss;
    ss << "plan start not free: " << start;
    throw DomainError(ss.str());
  }
  for (const Cell& w : waypoints) {
    if (!map_->is_free(w)) {
      std::ostringstream ss;
      ss << "waypoint not free: " << w;
      throw DomainError(ss.str());
    }
  }

  ConstraintIndex index(*map_, constraints);
  if (index.vertex_blocked(map_->index(start), 0)) {
    throw InfeasibleError("start cell is avoided at time 0");
  }

  // Legs to plan: the waypoints, plus a settle leg on the start cell when the
  // agent would otherwise rest on a cell that is avoided later.
  std::vector<Cell> targets = waypoints;
  bool settle_only = false;
  if (targets.empty()) {
    if (index.last_vertex_time(map_->index(start)) < 0) {
      Path p;
      p.cells = {start};
      return p;
    }
    targets.push_back(start);
    settle_only = true;
  }

  // Time budget: room for every leg at its true length, every constraint, and
  // a full sweep of the map after the last avoidance has expired.
  int horizon = int(constraints.size()) + map_->area();
  for (const Constraint& c : constraints) {
    horizon = std::max(horizon, c.time + int(constraints.size()) + map_->area());
  }
  {
    Cell prev = start;
    for (const Cell& w : targets) {
      try {
        horizon += memo_->exact(prev, w);
      } catch (const UnreachableError&) {
        std::ostringstream ss;
        ss << "no route " << prev << " -> " << w;
        throw UnreachableError(ss.str());
      }
      prev = w;
    }
  }

  Path path;
  path.cells = {start};
  Cell cur = start;
  int now = 0;

  for (size_t leg = 0; leg < targets.size(); ++leg) {
    const Cell& target = targets[leg];
    bool final_leg = (leg + 1 == targets.size());
    // Resting on the goal afterwards must not step on any later avoidance.
    int min_goal_time = final_leg ? index.last_vertex_time(map_->index(target)) : -1;

    if (cur == target && now > min_goal_time) {
      // Zero-length leg.
      if (!settle_only) {
        path.waypoint_arrivals.push_back(WaypointArrival{int(leg), now});
      }
      continue;
    }

    std::priority_queue<OpenState, std::vector<OpenState>, OpenOrder> open;
    std::unordered_set<int64_t> closed;
    std::unordered_map<int64_t, int64_t> parent;  // state key -> predecessor key
    auto state_key = [this](const Cell& c, int t) {
      return int64_t(t) * map_->area() + map_->index(c);
    };

    open.push(OpenState{now + manhattan(cur, target), now, cur});
    bool found = false;
    int arrival = -1;

    while (!open.empty()) {
      OpenState top = open.top();
      open.pop();
      int64_t top_key = state_key(top.cell, top.time);
      if (!closed.insert(top_key).second) continue;
      ++expansions_;

      if (top.cell == target && top.time > min_goal_time) {
        arrival = top.time;
        found = true;
        // Reconstruct this leg back to (cur, now).
        std::vector<Cell> leg_cells;
        int64_t k = top_key;
        int t = top.time;
        while (t > now) {
          leg_cells.push_back(map_->cell_at(int(k % map_->area())));
          k = parent.at(k);
          --t;
        }
        std::reverse(leg_cells.begin(), leg_cells.end());
        path.cells.insert(path.cells.end(), leg_cells.begin(), leg_cells.end());
        break;
      }

      if (top.time + 1 > horizon) continue;
      std::vector<Cell> steps = neighbors(*map_, top.cell);
      steps.push_back(top.cell);  // waiting is a move
      for (const Cell& next : steps) {
        int ni = map_->index(next);
        if (index.vertex_blocked(ni, top.time + 1)) continue;
        if (index.edge_blocked(map_->index(top.cell), ni, top.time)) continue;
        int64_t nk = state_key(next, top.time + 1);
        if (closed.count(nk)) continue;
        auto [pit, fresh] = parent.emplace(nk, top_key);
        if (!fresh) continue;  // already queued at this exact time
        open.push(OpenState{top.time + 1 + manhattan(next, target), top.time + 1, next});
      }
    }

    if (!found) {
      // Decide which failure this is: no route at all, or constrained out.
      try {
        memo_->exact(cur, target);
      } catch (const UnreachableError&) {
        std::ostringstream ss;
        ss << "no route " << cur << " -> " << target;
        throw UnreachableError(ss.str());
      }
      std::ostringstream ss;
      ss << "constraints exclude every route " << cur << " -> " << target
         << " within horizon " << horizon;
      throw InfeasibleError(ss.str());
    }

    if (constraints.empty()) {
      memo_->record(cur, target, arrival - now);
    }
    if (!settle_only) {
      // The waypoint counts from its first touch on this leg; the leg may
      // run longer when a later avoidance forced a vacate-and-return.
      int first_touch = arrival;
      for (int t = now; t <= arrival; ++t) {
        if (path.cells[t] == target) {
          first_touch = t;
          break;
        }
      }
      path.waypoint_arrivals.push_back(WaypointArrival{int(leg), first_touch});
    }
    cur = target;
    now = arrival;
  }

  return path;
}

}  // namespace ctapf
