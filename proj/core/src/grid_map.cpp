#include "ctapf/grid_map.hpp"

#include <cstdlib>
#include <deque>
#include <ostream>
#include <sstream>

namespace ctapf {

std::ostream& operator<<(std::ostream& os, const Cell& c) {
  return os << "(" << c.x << "," << c.y << ")";
}

GridMap::GridMap(int width, int height, const std::vector<Cell>& obstacles)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw FormatError("map dimensions must be positive");
  }
  blocked_.assign(size_t(width) * height, 0);
  for (const Cell& c : obstacles) {
    if (!in_bounds(c)) {
      std::ostringstream ss;
      ss << "obstacle " << c << " outside " << width << "x" << height << " map";
      throw FormatError(ss.str());
    }
    blocked_[index(c)] = 1;
  }
  free_cells_ = 0;
  for (uint8_t b : blocked_) free_cells_ += b ? 0 : 1;
  if (free_cells_ == 0) throw FormatError("map has no free cell");
}

std::vector<Cell> GridMap::obstacles() const {
  std::vector<Cell> out;
  for (int i = 0; i < area(); ++i) {
    if (blocked_[i]) out.push_back(cell_at(i));
  }
  return out;
}

GridMap parse_map(const std::string& text) {
  std::vector<std::string> rows;
  std::string row;
  std::istringstream in(text);
  while (std::getline(in, row)) {
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    rows.push_back(row);
  }
  if (rows.empty()) throw FormatError("empty map text");
  size_t width = rows[0].size();
  std::vector<Cell> obstacles;
  for (size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != width) {
      throw FormatError("ragged map: row " + std::to_string(y) + " has " +
                        std::to_string(rows[y].size()) + " columns, expected " +
                        std::to_string(width));
    }
    for (size_t x = 0; x < width; ++x) {
      char ch = rows[y][x];
      if (ch == '#') {
        obstacles.push_back(Cell{int(x), int(y)});
      } else if (ch != '.') {
        throw FormatError(std::string("illegal map character '") + ch + "'");
      }
    }
  }
  return GridMap(int(width), int(rows.size()), obstacles);
}

std::string map_to_text(const GridMap& map) {
  std::string out;
  out.reserve(size_t(map.area()) + map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      out += map.is_obstacle(Cell{x, y}) ? '#' : '.';
    }
    out += '\n';
  }
  return out;
}

std::vector<Cell> neighbors(const GridMap& map, const Cell& c) {
  if (!map.in_bounds(c)) {
    std::ostringstream ss;
    ss << "neighbors query outside map: " << c;
    throw DomainError(ss.str());
  }
  if (map.is_obstacle(c)) {
    std::ostringstream ss;
    ss << "neighbors query on obstacle: " << c;
    throw DomainError(ss.str());
  }
  // Row-major order: up, left, right, down.
  const Cell cand[4] = {{c.x, c.y - 1}, {c.x - 1, c.y}, {c.x + 1, c.y}, {c.x, c.y + 1}};
  std::vector<Cell> out;
  for (const Cell& n : cand) {
    if (map.is_free(n)) out.push_back(n);
  }
  return out;
}

int manhattan(const Cell& a, const Cell& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

int DistanceMemo::exact(const Cell& a, const Cell& b) {
  if (!map_->is_free(a) || !map_->is_free(b)) {
    std::ostringstream ss;
    ss << "distance query on non-free cell: " << a << " -> " << b;
    throw DomainError(ss.str());
  }
  int ia = map_->index(a);
  int ib = map_->index(b);
  auto it = memo_.find(pair_key(ia, ib));
  if (it != memo_.end()) return it->second;

  // One sweep memoizes the whole distance field anchored at a.
  std::vector<int> dist(map_->area(), -1);
  std::deque<int> queue;
  dist[ia] = 0;
  queue.push_back(ia);
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    for (const Cell& n : neighbors(*map_, map_->cell_at(cur))) {
      int ni = map_->index(n);
      if (dist[ni] < 0) {
        dist[ni] = dist[cur] + 1;
        queue.push_back(ni);
      }
    }
  }
  for (int i = 0; i < map_->area(); ++i) {
    if (dist[i] >= 0) memo_.emplace(pair_key(ia, i), dist[i]);
  }
  if (dist[ib] < 0) {
    std::ostringstream ss;
    ss << "no route " << a << " -> " << b;
    throw UnreachableError(ss.str());
  }
  return dist[ib];
}

int DistanceMemo::estimate(const Cell& a, const Cell& b) const {
  auto it = memo_.find(pair_key(map_->index(a), map_->index(b)));
  return it != memo_.end() ? it->second : manhattan(a, b);
}

void DistanceMemo::record(const Cell& a, const Cell& b, int distance) {
  memo_.emplace(pair_key(map_->index(a), map_->index(b)), distance);
}

}  // namespace ctapf
