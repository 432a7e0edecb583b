#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "triplan/catalog.hpp"
#include "triplan/geometry.hpp"
#include "triplan/rng.hpp"
#include "triplan/scene.hpp"
#include "triplan/task.hpp"

namespace triplan {

enum class ActionKind : std::uint8_t {
  MoveAhead,
  RotateLeft,
  RotateRight,
  LookUp,
  LookDown,
  PickUp,
  Put,
  Open,
  Close,
  ToggleOn,
  ToggleOff,
  Slice,
  Clean,
  Heat,
  Cool,
};

constexpr int kActionKindCount = 15;

const char* to_string(ActionKind k);
std::optional<ActionKind> action_kind_from_string(const std::string& s);

// Interactions resolve a target and can fail with the reasons below;
// navigation kinds (MoveAhead/rotations/pitch) only ever fail Blocked.
bool is_interaction(ActionKind k);

// Target is an explicit instance id when >= 0, otherwise a category name
// resolved by the simulator to the nearest visible instance.
struct Action {
  ActionKind kind = ActionKind::MoveAhead;
  int target_id = -1;
  std::string target_category;
};

enum class FailureReason : std::uint8_t {
  TooFar,
  Blocked,
  NotVisible,
  ReceptacleClosed,
  WrongPitch,
  HandsFull,
  HandsEmpty,
  InvalidTarget,
};

const char* to_string(FailureReason r);

struct ActionOutcome {
  bool success = false;
  std::optional<FailureReason> failure;
  bool state_changed = false;
  int resolved_target = -1;  // instance the simulator acted on, if any
};

struct AgentState {
  Cell cell;
  Direction dir = Direction::North;
  int pitch = 0;  // -1 down, 0 level, +1 up
  ObjectId holding = kNoObject;
};

// One range sample. azimuth is relative to the agent heading (radians),
// height is the continuous elevation of the sampled surface, depth is the
// horizontal distance to it. instance_id is kNoObject for walls and floor.
struct Pixel {
  double azimuth = 0.0;
  double height = 0.0;
  double depth = 0.0;
  CategoryId category = 0;
  ObjectId instance_id = kNoObject;
  int local_mask_id = 0;
};

struct Observation {
  int step_index = 0;
  AgentState pose;
  std::vector<Pixel> pixels;
  // (instance id, category) for every object with at least one pixel,
  // ascending by id.
  std::vector<std::pair<ObjectId, CategoryId>> detected;
};

struct NoiseConfig {
  double depth_sigma = 0.0;
  double mask_dropout = 0.0;
};

struct SimConfig {
  double interaction_range = 2.0;  // cells
  int view_distance = 8;           // cells; the view cone half-angle is 45deg
  NoiseConfig noise;
};

// Mutable simulation state over an immutable Scene layout. Deterministic:
// the same scene, seed and action sequence reproduce bit-identical state and
// observations.
class World {
 public:
  World(Scene scene, SimConfig config = {}, std::uint64_t noise_seed = 0);

  const Scene& scene() const { return scene_; }
  const SimConfig& config() const { return config_; }
  const AgentState& agent() const { return agent_; }
  int step_count() const { return step_count_; }
  int z_levels() const { return scene_.z_levels; }

  const std::vector<ObjectInstance>& objects() const { return objects_; }
  const ObjectInstance& object(ObjectId id) const;
  bool has_object(ObjectId id) const;

  // Pitch level whose slice is centered for interaction, and the visible
  // slice window (center +/- 1 clipped to [0, Z)).
  int center_slice() const { return agent_.pitch + scene_.z_levels / 2; }
  bool slice_in_window(int z) const;

  // True iff the object is inside a closed openable receptacle or held.
  bool hidden_by_containment(ObjectId id) const;

  // Ground-truth visibility used by interaction feasibility (noise-free).
  bool cell_has_line_of_sight(Cell target) const;
  std::vector<ObjectId> visible_objects() const;

  // Sensor frame; applies the configured noise (per-segment dropout draw in
  // mask-id order, then per-pixel depth noise in emission order).
  Observation observe();

  ActionOutcome step(const Action& action);

  std::vector<bool> goal_conditions_met(const TaskSpec& task) const;
  double goal_fraction(const TaskSpec& task) const;
  bool goal_satisfied(const TaskSpec& task) const;

  // Cells an agent can stand on: in bounds, not wall, not furniture.
  bool traversable(Cell c) const;
  bool blocked_for_ray(Cell c) const;  // wall or furniture column

  std::string state_json() const;  // full dynamic state, canonical order
  std::uint64_t state_hash() const;

 private:
  struct ResolvedTarget {
    ObjectId id = kNoObject;
    std::optional<FailureReason> failure;
  };

  Observation ground_truth_frame() const;
  // category_ok gates which categories are legal for this interaction; a
  // mismatch is InvalidTarget regardless of visibility.
  template <typename Pred>
  ResolvedTarget resolve_interaction_target(const Action& a, Pred category_ok) const;
  ActionOutcome fail(FailureReason r) const;
  ActionOutcome ok(bool changed, ObjectId target = kNoObject) const;
  ObjectId nearest_appliance_within_range(CategoryId cat) const;
  std::optional<Cell> free_slot(const ObjectInstance& host) const;
  ObjectInstance& object_mut(ObjectId id);

  Scene scene_;
  SimConfig config_;
  std::vector<ObjectInstance> objects_;
  AgentState agent_;
  int step_count_ = 0;
  int next_object_id_ = 0;
  Rng noise_rng_;
  std::vector<std::uint8_t> furniture_mask_;  // row-major, blocks rays + walking
};

}  // namespace triplan
