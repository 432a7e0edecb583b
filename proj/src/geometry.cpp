#include "triplan/geometry.hpp"

#include <cstdlib>
#include <limits>

namespace triplan {

Direction rotate_right(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 1) & 3);
}

Direction rotate_left(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) & 3);
}

Cell delta(Direction d) {
  switch (d) {
    case Direction::North: return {-1, 0};
    case Direction::East: return {0, 1};
    case Direction::South: return {1, 0};
    case Direction::West: return {0, -1};
  }
  return {0, 0};
}

Cell step_from(Cell c, Direction d) {
  Cell dl = delta(d);
  return {c.row + dl.row, c.col + dl.col};
}

long long dist2(Cell a, Cell b) {
  long long dr = a.row - b.row;
  long long dc = a.col - b.col;
  return dr * dr + dc * dc;
}

double distance_to_footprint(Cell a, const std::vector<Cell>& cells) {
  if (cells.empty()) return std::numeric_limits<double>::infinity();
  long long best = std::numeric_limits<long long>::max();
  for (const Cell& c : cells) best = std::min(best, dist2(a, c));
  return std::sqrt(static_cast<double>(best));
}

bool in_view_cone(Cell eye, Direction dir, Cell target) {
  if (eye == target) return false;
  Cell h = delta(dir);
  long long dr = target.row - eye.row;
  long long dc = target.col - eye.col;
  long long dot = h.row * dr + h.col * dc;
  long long cross = h.row * dc - h.col * dr;
  // |azimuth| <= 45deg  <=>  dot >= |cross|, with dot > 0 ahead of the eye.
  return dot > 0 && dot >= std::llabs(cross);
}

std::vector<Cell> line_of_sight_cells(Cell from, Cell to) {
  std::vector<Cell> out;
  int dr = to.row - from.row;
  int dc = to.col - from.col;
  int sr = dr > 0 ? 1 : (dr < 0 ? -1 : 0);
  int sc = dc > 0 ? 1 : (dc < 0 ? -1 : 0);
  long long adr = std::llabs(static_cast<long long>(dr));
  long long adc = std::llabs(static_cast<long long>(dc));

  // Segment runs between cell centers, so boundary crossings happen at
  // parameter t = (k + 1/2) / a along each axis. Compare crossing times with
  // the cross-multiplied integers (2k+1)*adc vs (2m+1)*adr; equality means
  // the segment passes exactly through a corner and both axes advance.
  Cell cur = from;
  long long k = 0, m = 0;  // boundaries crossed on row/col axes
  while (k < adr || m < adc) {
    long long tr = (k < adr) ? (2 * k + 1) * (adc == 0 ? 1 : adc)
                             : std::numeric_limits<long long>::max();
    long long tc = (m < adc) ? (2 * m + 1) * (adr == 0 ? 1 : adr)
                             : std::numeric_limits<long long>::max();
    if (tr < tc) {
      cur.row += sr;
      ++k;
    } else if (tc < tr) {
      cur.col += sc;
      ++m;
    } else {
      cur.row += sr;
      cur.col += sc;
      ++k;
      ++m;
    }
    if (!(cur == to)) out.push_back(cur);
  }
  return out;
}

}  // namespace triplan
