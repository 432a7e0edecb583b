#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "triplan/catalog.hpp"
#include "triplan/geometry.hpp"

namespace triplan {

using ObjectId = int;
constexpr ObjectId kNoObject = -1;

struct ObjectInstance {
  ObjectId id = kNoObject;
  CategoryId category = 0;
  std::vector<Cell> footprint;  // sorted, row-major; one cell for items
  int z = 0;                    // height slice where the object is seen/used
  ObjectId container = kNoObject;  // hosting furniture, kNoObject if none
  bool open = false;
  bool toggled_on = false;
  bool cleaned = false;
  bool heated = false;
  bool cooled = false;
  bool sliced = false;
  bool held = false;

  Cell cell() const { return footprint.front(); }
};

struct SceneProfile {
  std::string name = "default";
  int height = 24;
  int width = 24;
  int z_levels = 3;
  int rooms = 2;              // straight partition walls with door gaps
  int min_furniture = 12;
  int max_furniture = 16;
  int min_items = 10;
  int max_items = 14;
  double occlusion_rate = 0.0;  // chance an item starts inside a closed openable
  // Chance an item is placed into one of its co-occurrence hosts (weighted)
  // rather than a uniform pick. Homes mostly follow habit; the commonsense
  // prior is only worth anything because the world does too.
  double host_affinity = 0.75;
  // Restrict extra furniture to these classes (mandatory appliances are always
  // placed). Empty means the default mix.
  std::vector<std::string> furniture_classes;
  // When set, only this openable class is placed (used by audit/search tests).
  bool single_openable_class = false;
  bool ensure_duplicate_item = true;
};

struct ProfileInfeasible : std::runtime_error {
  explicit ProfileInfeasible(const std::string& what) : std::runtime_error(what) {}
};

struct Scene {
  int schema_version = 1;
  std::uint64_t seed = 0;
  SceneProfile profile;
  int height = 0;
  int width = 0;
  int z_levels = 3;
  std::vector<std::uint8_t> walls;  // row-major
  std::vector<ObjectInstance> objects;  // id == index at generation time
  Cell agent_start;
  Direction agent_dir = Direction::North;

  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height && c.col >= 0 && c.col < width;
  }
  bool wall_at(Cell c) const {
    return walls[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(c.col)] != 0;
  }
};

// Deterministic scene synthesis. Guarantees: perimeter walls, connected floor,
// the appliances every task type needs (Sink, Microwave, Fridge, a lamp),
// at least one surface and one openable receptacle with free capacity, and
// `occlusion_rate` of items hidden inside closed openable receptacles.
Scene generate_scene(std::uint64_t seed, const SceneProfile& profile = {});

// Named built-in profiles: default, half_hidden, occlusion_heavy,
// single_host, sparse.
SceneProfile named_profile(const std::string& name);

}  // namespace triplan
