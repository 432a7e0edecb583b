#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <vector>

namespace triplan {

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

// Headings, clockwise. North decreases row, East increases col.
enum class Direction : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

Direction rotate_right(Direction d);
Direction rotate_left(Direction d);
Cell step_from(Cell c, Direction d);
Cell delta(Direction d);

// Squared Euclidean distance between cell centers (integer, exact).
long long dist2(Cell a, Cell b);

// Euclidean distance between the centers of `a` and the nearest cell of
// `cells`; infinity for an empty footprint.
double distance_to_footprint(Cell a, const std::vector<Cell>& cells);

// True iff `target` lies inside the 90-degree view cone of an agent standing
// at `eye` facing `dir`. Exact integer predicate: the half-angle boundary
// (45 degrees) is inclusive; the eye cell itself is excluded.
bool in_view_cone(Cell eye, Direction dir, Cell target);

// Cells whose interior is crossed by the open segment between the centers of
// `from` and `to`, excluding both endpoint cells. Exact integer traversal;
// a segment passing exactly through a cell corner crosses neither adjacent
// side cell (diagonal advance).
std::vector<Cell> line_of_sight_cells(Cell from, Cell to);

}  // namespace triplan
