#pragma once

#include <climits>
#include <cstdint>
#include <vector>

#include "triplan/geometry.hpp"
#include "triplan/world.hpp"

namespace triplan {

// Grid distance-to-goal field. Distances count MoveAhead steps (4-connected,
// unit cost); INT_MAX marks cells that cannot reach any goal.
struct DistanceField {
  int height = 0;
  int width = 0;
  std::vector<int> values;

  int at(Cell c) const {
    if (c.row < 0 || c.row >= height || c.col < 0 || c.col >= width) return INT_MAX;
    return values[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(c.col)];
  }
  bool reachable(Cell c) const { return at(c) != INT_MAX; }
};

// Multi-source wavefront over `passable` (row-major, nonzero = walkable).
// Goals outside the grid or on impassable cells are ignored.
DistanceField build_distance_field(const std::vector<std::uint8_t>& passable, int height,
                                   int width, const std::vector<Cell>& goals);

struct NavStep {
  enum class Status { Step, Arrived, Unreachable };
  Status status = Status::Unreachable;
  ActionKind action = ActionKind::MoveAhead;
};

// Greedy descent on the field. Picks the lowest-valued passable neighbour,
// ties in [ahead, right, back, left] order relative to the current heading;
// emits MoveAhead when already facing it, otherwise a single rotation
// (RotateRight for right/back, RotateLeft for left).
NavStep next_nav_action(const DistanceField& field, const std::vector<std::uint8_t>& passable,
                        Cell cell, Direction dir);

// Passable cells within `range` (Euclidean, cell centers) of the footprint.
std::vector<Cell> goal_region(const std::vector<std::uint8_t>& passable, int height, int width,
                              const std::vector<Cell>& footprint, double range);

}  // namespace triplan
