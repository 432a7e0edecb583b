#include "triplan/nav.hpp"

#include <algorithm>
#include <deque>

namespace triplan {

DistanceField build_distance_field(const std::vector<std::uint8_t>& passable, int height,
                                   int width, const std::vector<Cell>& goals) {
  DistanceField f;
  f.height = height;
  f.width = width;
  f.values.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), INT_MAX);
  auto idx = [&](Cell c) {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.col);
  };
  auto walkable = [&](Cell c) {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width && passable[idx(c)] != 0;
  };
  std::deque<Cell> queue;
  for (Cell g : goals) {
    if (!walkable(g) || f.values[idx(g)] == 0) continue;
    f.values[idx(g)] = 0;
    queue.push_back(g);
  }
  while (!queue.empty()) {
    Cell cur = queue.front();
    queue.pop_front();
    int d = f.values[idx(cur)];
    for (Direction dir : {Direction::North, Direction::East, Direction::South, Direction::West}) {
      Cell nb = step_from(cur, dir);
      if (!walkable(nb) || f.values[idx(nb)] <= d + 1) continue;
      f.values[idx(nb)] = d + 1;
      queue.push_back(nb);
    }
  }
  return f;
}

NavStep next_nav_action(const DistanceField& field, const std::vector<std::uint8_t>& passable,
                        Cell cell, Direction dir) {
  NavStep out;
  int here = field.at(cell);
  if (here == INT_MAX) return out;  // Unreachable
  if (here == 0) {
    out.status = NavStep::Status::Arrived;
    return out;
  }
  auto walkable = [&](Cell c) {
    if (c.row < 0 || c.row >= field.height || c.col < 0 || c.col >= field.width) return false;
    return passable[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(field.width) +
                    static_cast<std::size_t>(c.col)] != 0;
  };
  // ahead, right, back, left
  Direction order[4] = {dir, rotate_right(dir), rotate_right(rotate_right(dir)),
                        rotate_left(dir)};
  int best = -1;
  int best_val = here;
  for (int i = 0; i < 4; ++i) {
    Cell nb = step_from(cell, order[i]);
    if (!walkable(nb)) continue;
    int v = field.at(nb);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == -1) return out;  // locally stuck: treat as unreachable
  out.status = NavStep::Status::Step;
  out.action = best == 0   ? ActionKind::MoveAhead
               : best == 3 ? ActionKind::RotateLeft
                           : ActionKind::RotateRight;
  return out;
}

std::vector<Cell> goal_region(const std::vector<std::uint8_t>& passable, int height, int width,
                              const std::vector<Cell>& footprint, double range) {
  std::vector<Cell> out;
  if (footprint.empty()) return out;
  int lo_r = height, hi_r = -1, lo_c = width, hi_c = -1;
  int pad = static_cast<int>(range) + 1;
  for (Cell f : footprint) {
    lo_r = std::min(lo_r, f.row - pad);
    hi_r = std::max(hi_r, f.row + pad);
    lo_c = std::min(lo_c, f.col - pad);
    hi_c = std::max(hi_c, f.col + pad);
  }
  for (int r = std::max(0, lo_r); r <= std::min(height - 1, hi_r); ++r) {
    for (int c = std::max(0, lo_c); c <= std::min(width - 1, hi_c); ++c) {
      Cell cell{r, c};
      if (passable[static_cast<std::size_t>(r) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(c)] == 0)
        continue;
      if (distance_to_footprint(cell, footprint) <= range) out.push_back(cell);
    }
  }
  return out;
}

}  // namespace triplan
