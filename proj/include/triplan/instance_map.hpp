#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "triplan/catalog.hpp"
#include "triplan/geometry.hpp"
#include "triplan/world.hpp"

namespace triplan {

struct MapCell {
  Cell cell;
  int z = 0;
  auto operator<=>(const MapCell&) const = default;
};

// One detector segment reprojected to map cells (deduped, sorted).
struct ProjectedMask {
  int local_mask_id = 0;
  CategoryId category = 0;
  ObjectId true_instance = kNoObject;  // debug/eval only, never used to match
  std::vector<MapCell> cells;
};

struct MapInstance {
  int id = 0;
  CategoryId category = 0;
  std::vector<MapCell> cells;  // sorted, disjoint within a category
  int last_seen_step = 0;
};

enum class OccupancyState : std::uint8_t { Unknown = 0, Free = 1, Blocked = 2 };

// Persistent semantic map. Detector masks are matched to registered instances
// of the same category by footprint overlap ratio: the best-overlap instance
// wins if its ratio strictly exceeds `theta`, otherwise the mask registers a
// fresh id. Comparisons are exact (cross-multiplied integers); ties prefer
// the smallest id. A matched mask is merged by cell union, and any cell it
// covers is taken over from other instances of that category, so footprints
// of one category never overlap. Instances emptied by takeover are dropped;
// ids are never reused.
class InstanceMap {
 public:
  InstanceMap(int height, int width, int z_levels);

  static std::vector<ProjectedMask> project(const Observation& obs);

  // Ingests one frame: occupancy/explored carving plus instance matching.
  // Masks are processed in ascending local_mask_id order.
  void update(const Observation& obs, double theta);

  int height() const { return height_; }
  int width() const { return width_; }
  int z_levels() const { return z_levels_; }

  const std::map<int, MapInstance>& instances() const { return instances_; }
  bool has_instance(int id) const { return instances_.count(id) > 0; }
  const MapInstance& instance(int id) const { return instances_.at(id); }
  std::vector<int> instances_of(CategoryId category) const;  // ascending id

  // Ids of `category` ordered by walking distance: the minimum distance-field
  // value over free 4-neighbours of the footprint, ties by id, unreachable
  // last. `field` is row-major, INT_MAX meaning unreachable (see nav).
  std::vector<int> query_instances(CategoryId category, const std::vector<int>& field) const;

  OccupancyState occupancy(Cell c) const;
  bool explored(Cell c) const;
  bool passable(Cell c) const { return occupancy(c) != OccupancyState::Blocked; }
  // Row-major grid of cells the planner may stand on (known-free only).
  std::vector<std::uint8_t> free_grid() const;
  // Unknown-or-free grid used for exploration frontiers.
  std::vector<std::uint8_t> optimistic_grid() const;

  // Bump evidence: a refused forward step proves the cell ahead is blocked.
  void mark_blocked(Cell c);

  void mark_visited(int id) { visited_.insert(id); }
  bool was_visited(int id) const { return visited_.count(id) > 0; }
  const std::set<int>& visited() const { return visited_; }

  // Frontier cells: known-free cells 4-adjacent to an unexplored cell.
  std::vector<Cell> frontier_cells() const;

  std::string to_json() const;
  static InstanceMap from_json(const std::string& text);

 private:
  std::size_t grid_index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }
  std::size_t layer_index(CategoryId cat, const MapCell& mc) const;
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  void assign_cell(CategoryId cat, const MapCell& mc, int id);

  int height_ = 0;
  int width_ = 0;
  int z_levels_ = 0;
  int next_id_ = 0;
  std::map<int, MapInstance> instances_;
  std::vector<int> layer_;  // [category][z][row][col] -> instance id or -1
  std::vector<std::uint8_t> occupancy_;
  std::vector<std::uint8_t> explored_;
  std::set<int> visited_;
};

}  // namespace triplan
