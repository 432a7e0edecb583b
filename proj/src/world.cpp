#include "triplan/world.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

namespace triplan {

using nlohmann::json;

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::MoveAhead: return "MoveAhead";
    case ActionKind::RotateLeft: return "RotateLeft";
    case ActionKind::RotateRight: return "RotateRight";
    case ActionKind::LookUp: return "LookUp";
    case ActionKind::LookDown: return "LookDown";
    case ActionKind::PickUp: return "PickUp";
    case ActionKind::Put: return "Put";
    case ActionKind::Open: return "Open";
    case ActionKind::Close: return "Close";
    case ActionKind::ToggleOn: return "ToggleOn";
    case ActionKind::ToggleOff: return "ToggleOff";
    case ActionKind::Slice: return "Slice";
    case ActionKind::Clean: return "Clean";
    case ActionKind::Heat: return "Heat";
    case ActionKind::Cool: return "Cool";
  }
  return "?";
}

std::optional<ActionKind> action_kind_from_string(const std::string& s) {
  for (int i = 0; i < kActionKindCount; ++i) {
    ActionKind k = static_cast<ActionKind>(i);
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

bool is_interaction(ActionKind k) {
  switch (k) {
    case ActionKind::MoveAhead:
    case ActionKind::RotateLeft:
    case ActionKind::RotateRight:
    case ActionKind::LookUp:
    case ActionKind::LookDown:
      return false;
    default:
      return true;
  }
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::TooFar: return "TooFar";
    case FailureReason::Blocked: return "Blocked";
    case FailureReason::NotVisible: return "NotVisible";
    case FailureReason::ReceptacleClosed: return "ReceptacleClosed";
    case FailureReason::WrongPitch: return "WrongPitch";
    case FailureReason::HandsFull: return "HandsFull";
    case FailureReason::HandsEmpty: return "HandsEmpty";
    case FailureReason::InvalidTarget: return "InvalidTarget";
  }
  return "?";
}

World::World(Scene scene, SimConfig config, std::uint64_t noise_seed)
    : scene_(std::move(scene)),
      config_(config),
      objects_(scene_.objects),
      noise_rng_(derive_seed(noise_seed, 0xfeedu)) {
  agent_.cell = scene_.agent_start;
  agent_.dir = scene_.agent_dir;
  next_object_id_ = 0;
  for (const auto& o : objects_) next_object_id_ = std::max(next_object_id_, o.id + 1);
  furniture_mask_.assign(scene_.walls.size(), 0);
  const Catalog& cat = Catalog::standard();
  for (const auto& o : objects_) {
    if (!cat.info(o.category).blocking) continue;
    for (Cell c : o.footprint) {
      furniture_mask_[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(scene_.width) +
                      static_cast<std::size_t>(c.col)] = 1;
    }
  }
}

const ObjectInstance& World::object(ObjectId id) const {
  for (const auto& o : objects_) {
    if (o.id == id) return o;
  }
  throw std::out_of_range("no such object id: " + std::to_string(id));
}

ObjectInstance& World::object_mut(ObjectId id) {
  return const_cast<ObjectInstance&>(object(id));
}

bool World::has_object(ObjectId id) const {
  for (const auto& o : objects_) {
    if (o.id == id) return true;
  }
  return false;
}

bool World::slice_in_window(int z) const {
  int c = center_slice();
  return z >= 0 && z < scene_.z_levels && std::abs(z - c) <= 1;
}

bool World::hidden_by_containment(ObjectId id) const {
  const ObjectInstance& o = object(id);
  if (o.held) return true;
  if (o.container == kNoObject) return false;
  const ObjectInstance& host = object(o.container);
  return Catalog::standard().info(host.category).openable && !host.open;
}

bool World::traversable(Cell c) const {
  if (!scene_.in_bounds(c)) return false;
  std::size_t i = static_cast<std::size_t>(c.row) * static_cast<std::size_t>(scene_.width) +
                  static_cast<std::size_t>(c.col);
  return scene_.walls[i] == 0 && furniture_mask_[i] == 0;
}

bool World::blocked_for_ray(Cell c) const {
  if (!scene_.in_bounds(c)) return true;
  std::size_t i = static_cast<std::size_t>(c.row) * static_cast<std::size_t>(scene_.width) +
                  static_cast<std::size_t>(c.col);
  return scene_.walls[i] != 0 || furniture_mask_[i] != 0;
}

bool World::cell_has_line_of_sight(Cell target) const {
  if (!scene_.in_bounds(target)) return false;
  if (!in_view_cone(agent_.cell, agent_.dir, target)) return false;
  long long vd = config_.view_distance;
  if (dist2(agent_.cell, target) > vd * vd) return false;
  for (Cell c : line_of_sight_cells(agent_.cell, target)) {
    if (blocked_for_ray(c)) return false;
  }
  return true;
}

// Canonical noise-free frame. Pixel emission order: cells row-major, then
// furniture before items at a cell, items ascending by id; wall components
// and floor last. Mask ids follow first appearance.
Observation World::ground_truth_frame() const {
  const Catalog& cat = Catalog::standard();
  Observation obs;
  obs.step_index = step_count_;
  obs.pose = agent_;

  // Visible cells (2-D; blocking is a column property).
  std::vector<Cell> vis;
  int vd = config_.view_distance;
  for (int r = agent_.cell.row - vd; r <= agent_.cell.row + vd; ++r) {
    for (int c = agent_.cell.col - vd; c <= agent_.cell.col + vd; ++c) {
      Cell cell{r, c};
      if (cell_has_line_of_sight(cell)) vis.push_back(cell);
    }
  }

  // Residents per cell.
  std::map<Cell, std::vector<const ObjectInstance*>> residents;
  for (const auto& o : objects_) {
    if (o.held) continue;
    if (o.container != kNoObject) {
      const ObjectInstance& host = object(o.container);
      if (cat.info(host.category).openable && !host.open) continue;
    }
    for (Cell c : o.footprint) residents[c].push_back(&o);
  }
  for (auto& [cell, list] : residents) {
    std::sort(list.begin(), list.end(), [&](const ObjectInstance* a, const ObjectInstance* b) {
      bool fa = cat.info(a->category).blocking, fb = cat.info(b->category).blocking;
      if (fa != fb) return fa;
      return a->id < b->id;
    });
  }

  Cell hd = delta(agent_.dir);
  auto azimuth_of = [&](Cell target) {
    double dr = target.row - agent_.cell.row;
    double dc = target.col - agent_.cell.col;
    double forward = hd.row * dr + hd.col * dc;
    double lateral = hd.row * dc - hd.col * dr;
    return std::atan2(lateral, forward);
  };
  auto depth_of = [&](Cell target) {
    return std::sqrt(static_cast<double>(dist2(agent_.cell, target)));
  };

  std::map<ObjectId, int> object_mask;
  int next_mask = 0;
  std::vector<Cell> wall_cells;
  std::vector<Cell> floor_cells;

  for (Cell cell : vis) {
    std::size_t i = static_cast<std::size_t>(cell.row) * static_cast<std::size_t>(scene_.width) +
                    static_cast<std::size_t>(cell.col);
    if (scene_.walls[i]) {
      wall_cells.push_back(cell);
      continue;
    }
    auto it = residents.find(cell);
    bool furniture_here = furniture_mask_[i] != 0;
    if (it != residents.end()) {
      for (const ObjectInstance* o : it->second) {
        if (!slice_in_window(o->z)) continue;
        auto [mit, inserted] = object_mask.try_emplace(o->id, next_mask);
        if (inserted) ++next_mask;
        Pixel px;
        px.azimuth = azimuth_of(cell);
        px.height = o->z + 0.5;
        px.depth = depth_of(cell);
        px.category = o->category;
        px.instance_id = o->id;
        px.local_mask_id = mit->second;
        obs.pixels.push_back(px);
      }
    }
    if (!furniture_here && slice_in_window(0)) floor_cells.push_back(cell);
  }

  // Wall pixels: one mask per 4-connected component, spanning the visible
  // slice window (walls are full-height).
  {
    std::map<Cell, int> comp;
    for (Cell c : wall_cells) comp[c] = -1;
    int comp_count = 0;
    for (Cell c : wall_cells) {
      if (comp[c] != -1) continue;
      std::vector<Cell> stack{c};
      comp[c] = comp_count;
      while (!stack.empty()) {
        Cell cur = stack.back();
        stack.pop_back();
        for (Direction d :
             {Direction::North, Direction::East, Direction::South, Direction::West}) {
          Cell nb = step_from(cur, d);
          auto itc = comp.find(nb);
          if (itc != comp.end() && itc->second == -1) {
            itc->second = comp_count;
            stack.push_back(nb);
          }
        }
      }
      ++comp_count;
    }
    std::vector<int> mask_of_comp(static_cast<std::size_t>(comp_count), -1);
    for (Cell c : wall_cells) {
      int k = comp[c];
      if (mask_of_comp[static_cast<std::size_t>(k)] == -1) {
        mask_of_comp[static_cast<std::size_t>(k)] = next_mask++;
      }
      for (int z = 0; z < scene_.z_levels; ++z) {
        if (!slice_in_window(z)) continue;
        Pixel px;
        px.azimuth = azimuth_of(c);
        px.height = z + 0.5;
        px.depth = depth_of(c);
        px.category = Catalog::standard().wall();
        px.instance_id = kNoObject;
        px.local_mask_id = mask_of_comp[static_cast<std::size_t>(k)];
        obs.pixels.push_back(px);
      }
    }
  }

  // Floor pixels: ground slice, single mask per frame.
  if (!floor_cells.empty()) {
    int floor_mask = next_mask++;
    for (Cell c : floor_cells) {
      Pixel px;
      px.azimuth = azimuth_of(c);
      px.height = 0.25;
      px.depth = depth_of(c);
      px.category = Catalog::standard().floor();
      px.instance_id = kNoObject;
      px.local_mask_id = floor_mask;
      obs.pixels.push_back(px);
    }
  }

  for (const auto& [id, mask] : object_mask) {
    obs.detected.emplace_back(id, object(id).category);
  }
  return obs;
}

Observation World::observe() {
  Observation obs = ground_truth_frame();
  const NoiseConfig& nz = config_.noise;
  if (nz.mask_dropout > 0.0) {
    // One dropout draw per object segment, ascending mask id.
    std::map<int, ObjectId> masks;  // mask id -> object
    for (const Pixel& p : obs.pixels) {
      if (p.instance_id != kNoObject) masks.emplace(p.local_mask_id, p.instance_id);
    }
    std::vector<int> dropped;
    for (const auto& [mask, id] : masks) {
      if (noise_rng_.chance(nz.mask_dropout)) dropped.push_back(mask);
    }
    if (!dropped.empty()) {
      std::erase_if(obs.pixels, [&](const Pixel& p) {
        return p.instance_id != kNoObject &&
               std::find(dropped.begin(), dropped.end(), p.local_mask_id) != dropped.end();
      });
    }
  }
  if (nz.depth_sigma > 0.0) {
    for (Pixel& p : obs.pixels) {
      p.depth = std::max(0.0, p.depth + noise_rng_.gaussian(0.0, nz.depth_sigma));
    }
  }
  // Rebuild detected from surviving pixels.
  obs.detected.clear();
  std::map<ObjectId, CategoryId> det;
  for (const Pixel& p : obs.pixels) {
    if (p.instance_id != kNoObject) det.emplace(p.instance_id, p.category);
  }
  obs.detected.assign(det.begin(), det.end());
  return obs;
}

std::vector<ObjectId> World::visible_objects() const {
  Observation obs = ground_truth_frame();
  std::vector<ObjectId> out;
  for (const auto& [id, cat] : obs.detected) out.push_back(id);
  return out;
}

ActionOutcome World::fail(FailureReason r) const {
  ActionOutcome o;
  o.success = false;
  o.failure = r;
  o.state_changed = false;
  return o;
}

ActionOutcome World::ok(bool changed, ObjectId target) const {
  ActionOutcome o;
  o.success = true;
  o.state_changed = changed;
  o.resolved_target = target;
  return o;
}

// Resolve an interaction target to a concrete instance. Category mismatches
// and malformed targets produce InvalidTarget; visibility and containment
// produce NotVisible / ReceptacleClosed. Distance and pitch checks happen at
// the call site so the failure priority stays uniform across actions.
template <typename Pred>
World::ResolvedTarget World::resolve_interaction_target(const Action& a, Pred category_ok) const {
  const Catalog& cat = Catalog::standard();
  ResolvedTarget out;

  std::vector<ObjectId> vis = visible_objects();
  auto is_visible = [&](ObjectId id) {
    return std::find(vis.begin(), vis.end(), id) != vis.end();
  };
  auto closed_host_nearby = [&](const ObjectInstance& o) {
    // Target hidden inside a closed receptacle: report ReceptacleClosed when
    // the agent is actually at that receptacle, NotVisible otherwise.
    if (o.container == kNoObject) return false;
    const ObjectInstance& host = object(o.container);
    if (!cat.info(host.category).openable || host.open) return false;
    return is_visible(host.id) &&
           distance_to_footprint(agent_.cell, host.footprint) <= config_.interaction_range;
  };

  if (a.target_id >= 0) {
    if (!has_object(a.target_id)) {
      out.failure = FailureReason::InvalidTarget;
      return out;
    }
    const ObjectInstance& o = object(a.target_id);
    if (!category_ok(o.category) || o.held) {
      out.failure = FailureReason::InvalidTarget;
      return out;
    }
    if (!is_visible(o.id)) {
      out.failure =
          closed_host_nearby(o) ? FailureReason::ReceptacleClosed : FailureReason::NotVisible;
      return out;
    }
    out.id = o.id;
    return out;
  }

  if (a.target_category.empty() || !cat.contains(a.target_category)) {
    out.failure = FailureReason::InvalidTarget;
    return out;
  }
  CategoryId want = cat.id(a.target_category);
  if (!category_ok(want)) {
    out.failure = FailureReason::InvalidTarget;
    return out;
  }
  ObjectId best = kNoObject;
  long long best_d = 0;
  for (const auto& o : objects_) {
    if (o.category != want || o.held) continue;
    if (!is_visible(o.id)) continue;
    long long d = dist2(agent_.cell, o.cell());
    for (Cell c : o.footprint) d = std::min(d, dist2(agent_.cell, c));
    if (best == kNoObject || d < best_d || (d == best_d && o.id < best)) {
      best = o.id;
      best_d = d;
    }
  }
  if (best == kNoObject) {
    for (const auto& o : objects_) {
      if (o.category != want || o.held) continue;
      if (closed_host_nearby(o)) {
        out.failure = FailureReason::ReceptacleClosed;
        return out;
      }
    }
    out.failure = FailureReason::NotVisible;
    return out;
  }
  out.id = best;
  return out;
}

ObjectId World::nearest_appliance_within_range(CategoryId cat_id) const {
  ObjectId best = kNoObject;
  double best_d = 0.0;
  for (const auto& o : objects_) {
    if (o.category != cat_id) continue;
    double d = distance_to_footprint(agent_.cell, o.footprint);
    if (d > config_.interaction_range) continue;
    if (best == kNoObject || d < best_d) {
      best = o.id;
      best_d = d;
    }
  }
  return best;
}

std::optional<Cell> World::free_slot(const ObjectInstance& host) const {
  for (Cell c : host.footprint) {
    bool taken = false;
    for (const auto& o : objects_) {
      if (o.container == host.id && !o.held && o.cell() == c) taken = true;
    }
    if (!taken) return c;
  }
  return std::nullopt;
}

// Interaction failures are checked in a fixed priority:
//   InvalidTarget > HandsFull/HandsEmpty > NotVisible/ReceptacleClosed >
//   TooFar > WrongPitch
// so a malformed request never masquerades as a recoverable one, and the
// recoverable reasons surface in the order a corrector can act on them.
ActionOutcome World::step(const Action& action) {
  const Catalog& cat = Catalog::standard();
  ++step_count_;

  auto in_range = [&](const ObjectInstance& o) {
    return distance_to_footprint(agent_.cell, o.footprint) <= config_.interaction_range;
  };
  auto pitch_ok = [&](const ObjectInstance& o) { return center_slice() == o.z; };
  // Splits a resolver result into its invalid stage and its visibility stage.
  auto invalid = [](const ResolvedTarget& rt) {
    return rt.failure && *rt.failure == FailureReason::InvalidTarget;
  };

  switch (action.kind) {
    case ActionKind::MoveAhead: {
      Cell nxt = step_from(agent_.cell, agent_.dir);
      if (!traversable(nxt)) return fail(FailureReason::Blocked);
      agent_.cell = nxt;
      return ok(true);
    }
    case ActionKind::RotateLeft:
      agent_.dir = rotate_left(agent_.dir);
      return ok(true);
    case ActionKind::RotateRight:
      agent_.dir = rotate_right(agent_.dir);
      return ok(true);
    case ActionKind::LookUp: {
      int max_pitch = scene_.z_levels - 1 - scene_.z_levels / 2;
      if (agent_.pitch >= max_pitch) return fail(FailureReason::Blocked);
      ++agent_.pitch;
      return ok(true);
    }
    case ActionKind::LookDown: {
      int min_pitch = -(scene_.z_levels / 2);
      if (agent_.pitch <= min_pitch) return fail(FailureReason::Blocked);
      --agent_.pitch;
      return ok(true);
    }
    case ActionKind::PickUp: {
      auto rt = resolve_interaction_target(
          action, [&](CategoryId c) { return cat.info(c).pickupable; });
      if (invalid(rt)) return fail(*rt.failure);
      if (agent_.holding != kNoObject) return fail(FailureReason::HandsFull);
      if (rt.failure) return fail(*rt.failure);
      ObjectInstance& o = object_mut(rt.id);
      if (!in_range(o)) return fail(FailureReason::TooFar);
      if (!pitch_ok(o)) return fail(FailureReason::WrongPitch);
      o.held = true;
      o.container = kNoObject;
      agent_.holding = o.id;
      return ok(true, o.id);
    }
    case ActionKind::Put: {
      // Target names the receptacle; the held object is implicit.
      auto rt = resolve_interaction_target(action, [&](CategoryId c) {
        return cat.info(c).surface || cat.info(c).openable;
      });
      if (invalid(rt)) return fail(*rt.failure);
      if (agent_.holding == kNoObject) return fail(FailureReason::HandsEmpty);
      if (rt.failure) return fail(*rt.failure);
      ObjectInstance& host = object_mut(rt.id);
      const auto& info = cat.info(host.category);
      if (info.openable && !host.open) return fail(FailureReason::ReceptacleClosed);
      if (!in_range(host)) return fail(FailureReason::TooFar);
      if (!pitch_ok(host)) return fail(FailureReason::WrongPitch);
      auto slot = free_slot(host);
      if (!slot) return fail(FailureReason::Blocked);
      ObjectInstance& held = object_mut(agent_.holding);
      held.held = false;
      held.container = host.id;
      held.footprint = {*slot};
      held.z = host.z;
      agent_.holding = kNoObject;
      return ok(true, host.id);
    }
    case ActionKind::Open:
    case ActionKind::Close: {
      auto rt = resolve_interaction_target(
          action, [&](CategoryId c) { return cat.info(c).openable; });
      if (rt.failure) return fail(*rt.failure);
      ObjectInstance& o = object_mut(rt.id);
      if (!in_range(o)) return fail(FailureReason::TooFar);
      if (!pitch_ok(o)) return fail(FailureReason::WrongPitch);
      bool want_open = action.kind == ActionKind::Open;
      bool changed = o.open != want_open;
      o.open = want_open;
      return ok(changed, o.id);
    }
    case ActionKind::ToggleOn:
    case ActionKind::ToggleOff: {
      auto rt = resolve_interaction_target(
          action, [&](CategoryId c) { return cat.info(c).toggleable; });
      if (rt.failure) return fail(*rt.failure);
      ObjectInstance& o = object_mut(rt.id);
      if (!in_range(o)) return fail(FailureReason::TooFar);
      if (!pitch_ok(o)) return fail(FailureReason::WrongPitch);
      bool want = action.kind == ActionKind::ToggleOn;
      bool changed = o.toggled_on != want;
      o.toggled_on = want;
      return ok(changed, o.id);
    }
    case ActionKind::Slice: {
      auto rt = resolve_interaction_target(
          action, [&](CategoryId c) { return cat.info(c).sliceable; });
      if (invalid(rt)) return fail(*rt.failure);
      if (agent_.holding == kNoObject) return fail(FailureReason::HandsEmpty);
      const ObjectInstance& knife = object(agent_.holding);
      if (cat.name(knife.category) != "Knife") return fail(FailureReason::InvalidTarget);
      if (rt.failure) return fail(*rt.failure);
      const ObjectInstance& target = object(rt.id);
      if (target.sliced) return fail(FailureReason::InvalidTarget);
      if (!in_range(target)) return fail(FailureReason::TooFar);
      if (!pitch_ok(target)) return fail(FailureReason::WrongPitch);
      // Replace the object with two slice halves in place.
      ObjectInstance tpl = target;
      std::erase_if(objects_, [&](const ObjectInstance& o) { return o.id == tpl.id; });
      for (int i = 0; i < 2; ++i) {
        ObjectInstance half = tpl;
        half.id = next_object_id_++;
        half.sliced = true;
        objects_.push_back(half);
      }
      return ok(true, tpl.id);
    }
    case ActionKind::Clean:
    case ActionKind::Heat:
    case ActionKind::Cool: {
      // The action names the held object (by id or category); the appliance
      // is whichever matching one is within reach.
      if (action.target_id < 0 && !cat.contains(action.target_category))
        return fail(FailureReason::InvalidTarget);
      if (agent_.holding == kNoObject) return fail(FailureReason::HandsEmpty);
      ObjectInstance& held = object_mut(agent_.holding);
      if (action.target_id >= 0 && action.target_id != held.id)
        return fail(FailureReason::InvalidTarget);
      if (action.target_id < 0 && cat.id(action.target_category) != held.category)
        return fail(FailureReason::InvalidTarget);
      const CategoryInfo& info = cat.info(held.category);
      const char* appliance = action.kind == ActionKind::Clean  ? "Sink"
                              : action.kind == ActionKind::Heat ? "Microwave"
                                                                : "Fridge";
      bool capable = action.kind == ActionKind::Clean  ? info.cleanable
                     : action.kind == ActionKind::Heat ? info.heatable
                                                       : info.coolable;
      if (!capable) return fail(FailureReason::InvalidTarget);
      ObjectId app = nearest_appliance_within_range(cat.id(appliance));
      if (app == kNoObject) return fail(FailureReason::TooFar);
      bool changed = false;
      if (action.kind == ActionKind::Clean && !held.cleaned) held.cleaned = changed = true;
      if (action.kind == ActionKind::Heat && !held.heated) held.heated = changed = true;
      if (action.kind == ActionKind::Cool && !held.cooled) held.cooled = changed = true;
      return ok(changed, held.id);
    }
  }
  return fail(FailureReason::InvalidTarget);
}

std::vector<bool> World::goal_conditions_met(const TaskSpec& task) const {
  const Catalog& cat = Catalog::standard();
  std::vector<bool> out;
  for (const Predicate& p : task.goal_conditions) {
    bool met = false;
    switch (p.kind) {
      case PredicateKind::InReceptacle: {
        if (!cat.contains(p.object_category) || !cat.contains(p.receptacle_category)) break;
        CategoryId oc = cat.id(p.object_category), rc = cat.id(p.receptacle_category);
        int count = 0;
        for (const auto& o : objects_) {
          if (o.category != oc || o.held || o.container == kNoObject) continue;
          if (object(o.container).category == rc) ++count;
        }
        met = count >= p.min_count;
        break;
      }
      case PredicateKind::Cleaned:
      case PredicateKind::Heated:
      case PredicateKind::Cooled: {
        if (!cat.contains(p.object_category)) break;
        CategoryId oc = cat.id(p.object_category);
        int count = 0;
        for (const auto& o : objects_) {
          if (o.category != oc) continue;
          bool flag = p.kind == PredicateKind::Cleaned   ? o.cleaned
                      : p.kind == PredicateKind::Heated ? o.heated
                                                         : o.cooled;
          if (flag) ++count;
        }
        met = count >= p.min_count;
        break;
      }
      case PredicateKind::Holding: {
        if (agent_.holding == kNoObject || !cat.contains(p.object_category)) break;
        met = object(agent_.holding).category == cat.id(p.object_category);
        break;
      }
      case PredicateKind::ToggledOn: {
        if (!cat.contains(p.object_category)) break;
        CategoryId oc = cat.id(p.object_category);
        for (const auto& o : objects_) {
          if (o.category == oc && o.toggled_on) met = true;
        }
        break;
      }
    }
    out.push_back(met);
  }
  return out;
}

double World::goal_fraction(const TaskSpec& task) const {
  std::vector<bool> met = goal_conditions_met(task);
  if (met.empty()) return 0.0;
  int n = 0;
  for (bool b : met) n += b;
  return static_cast<double>(n) / static_cast<double>(met.size());
}

bool World::goal_satisfied(const TaskSpec& task) const {
  for (bool b : goal_conditions_met(task)) {
    if (!b) return false;
  }
  return true;
}

std::string World::state_json() const {
  json j;
  j["step"] = step_count_;
  j["agent"] = {{"row", agent_.cell.row},
                {"col", agent_.cell.col},
                {"dir", static_cast<int>(agent_.dir)},
                {"pitch", agent_.pitch},
                {"holding", agent_.holding}};
  json objs = json::array();
  std::vector<ObjectInstance> sorted = objects_;
  std::sort(sorted.begin(), sorted.end(),
            [](const ObjectInstance& a, const ObjectInstance& b) { return a.id < b.id; });
  for (const auto& o : sorted) {
    json cells = json::array();
    for (Cell c : o.footprint) cells.push_back(json::array({c.row, c.col}));
    objs.push_back({{"id", o.id},
                    {"category", Catalog::standard().name(o.category)},
                    {"cells", cells},
                    {"z", o.z},
                    {"container", o.container},
                    {"open", o.open},
                    {"toggled_on", o.toggled_on},
                    {"cleaned", o.cleaned},
                    {"heated", o.heated},
                    {"cooled", o.cooled},
                    {"sliced", o.sliced},
                    {"held", o.held}});
  }
  j["objects"] = objs;
  return j.dump();
}

std::uint64_t World::state_hash() const { return fnv1a64(state_json()); }

}  // namespace triplan
