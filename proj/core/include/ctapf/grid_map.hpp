#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctapf/errors.hpp"

namespace ctapf {

struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Cell& o) const { return !(*this == o); }
  // Row-major order, used wherever a deterministic cell order is needed.
  bool operator<(const Cell& o) const { return y != o.y ? y < o.y : x < o.x; }
};

std::ostream& operator<<(std::ostream& os, const Cell& c);

inline size_t hash_combine(size_t seed, size_t v) {
  // Mixing step from the usual hash_combine recipe.
  return seed ^ (v + 0x9e3779b9 + (seed << 6) + (seed >> 2));
}

// Rectangular 4-connected grid with static obstacles. Immutable once built,
// safe to share across threads.
class GridMap {
 public:
  GridMap(int width, int height, const std::vector<Cell>& obstacles);

  int width() const { return width_; }
  int height() const { return height_; }
  int area() const { return width_ * height_; }

  bool in_bounds(const Cell& c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  bool is_obstacle(const Cell& c) const { return blocked_[index(c)]; }
  bool is_free(const Cell& c) const { return in_bounds(c) && !blocked_[index(c)]; }

  int free_cell_count() const { return free_cells_; }
  // Obstacles in row-major order.
  std::vector<Cell> obstacles() const;

  int index(const Cell& c) const { return c.y * width_ + c.x; }
  Cell cell_at(int index) const { return Cell{index % width_, index / width_}; }

  bool operator==(const GridMap& o) const {
    return width_ == o.width_ && height_ == o.height_ && blocked_ == o.blocked_;
  }

 private:
  int width_;
  int height_;
  int free_cells_;
  std::vector<uint8_t> blocked_;
};

// Parses the textual grid form: one row per line, '.' free, '#' blocked,
// row 0 is y = 0. Throws FormatError on ragged rows, other characters, or
// empty input.
GridMap parse_map(const std::string& text);

// Inverse of parse_map, with a trailing newline.
std::string map_to_text(const GridMap& map);

// Free 4-connected neighbors of a free cell, in row-major order.
// Throws DomainError if c is out of bounds or an obstacle.
std::vector<Cell> neighbors(const GridMap& map, const Cell& c);

int manhattan(const Cell& a, const Cell& b);

// Exact shortest-path distances with an unbounded per-instance memo keyed by
// unordered cell pair. One breadth-first sweep fills the memo for every pair
// anchored at its source. Not thread-safe; confine one instance per solver.
class DistanceMemo {
 public:
  explicit DistanceMemo(const GridMap& map) : map_(&map) {}

  // Exact distance; runs a BFS on a memo miss. Throws UnreachableError when
  // no route exists, DomainError on non-free endpoints.
  int exact(const Cell& a, const Cell& b);

  // Memoized exact distance when one is stored, Manhattan otherwise. Never
  // searches. This is the admissible estimate the solvers use.
  int estimate(const Cell& a, const Cell& b) const;

  // Records an exact distance discovered elsewhere (an unconstrained planner
  // leg is one source).
  void record(const Cell& a, const Cell& b, int distance);

  size_t size() const { return memo_.size(); }
  const GridMap& map() const { return *map_; }

 private:
  static uint64_t pair_key(int i, int j) {
    if (i > j) std::swap(i, j);
    return (uint64_t(uint32_t(i)) << 32) | uint32_t(j);
  }

  const GridMap* map_;
  std::unordered_map<uint64_t, int> memo_;
};

}  // namespace ctapf

namespace std {
template <>
struct hash<ctapf::Cell> {
  size_t operator()(const ctapf::Cell& c) const {
    return ctapf::hash_combine(std::hash<int>()(c.x), std::hash<int>()(c.y));
  }
};
}  // namespace std
