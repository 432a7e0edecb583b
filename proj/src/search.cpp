#include "triplan/search.hpp"

#include <algorithm>
#include <limits>

namespace triplan {

namespace {

constexpr double kReach = 2.0;
constexpr int kFrontierBudget = 150;

DistanceField field_from(const InstanceMap& map, Cell origin) {
  return build_distance_field(map.optimistic_grid(), map.height(), map.width(), {origin});
}

int instance_z(const MapInstance& inst) {
  return inst.cells.empty() ? 0 : inst.cells.front().z;
}

std::vector<Cell> instance_footprint(const MapInstance& inst) {
  std::vector<Cell> out;
  for (const MapCell& mc : inst.cells) out.push_back(mc.cell);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Every unvisited piece of furniture that could host an item, nearest first.
// The wide net for targets whose ranked hosts all came up empty.
std::vector<int> fallback_visit_queue(const InstanceMap& map, const std::vector<int>& field) {
  const Catalog& cat = Catalog::standard();
  std::vector<std::pair<int, int>> ranked;  // (distance, id)
  for (const auto& [id, inst] : map.instances()) {
    const CategoryInfo& info = cat.info(inst.category);
    if (!info.blocking || !(info.surface || info.openable)) continue;
    if (map.was_visited(id)) continue;
    int best = std::numeric_limits<int>::max();
    for (const MapCell& mc : inst.cells) {
      std::size_t i = static_cast<std::size_t>(mc.cell.row) * static_cast<std::size_t>(map.width()) +
                      static_cast<std::size_t>(mc.cell.col);
      if (i < field.size()) best = std::min(best, field[i]);
    }
    if (best == std::numeric_limits<int>::max()) continue;  // unreachable for now
    ranked.emplace_back(best, id);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<int> out;
  for (const auto& [d, id] : ranked) out.push_back(id);
  return out;
}

}  // namespace

bool needs_search(const std::string& key_category, const InstanceMap& map) {
  const Catalog& cat = Catalog::standard();
  if (!cat.contains(key_category)) return true;
  return map.instances_of(cat.id(key_category)).empty();
}

std::vector<std::string> predict_hosts(const std::string& item_category,
                                       const std::vector<std::string>& excluded) {
  std::vector<std::string> out;
  const CooccurrenceTable& table = CooccurrenceTable::builtin();
  if (!table.has(item_category)) return out;
  for (const HostEntry& h : table.hosts_for(item_category)) {
    if (std::find(excluded.begin(), excluded.end(), h.host) != excluded.end()) continue;
    out.push_back(h.host);
  }
  return out;
}

std::vector<int> build_visit_queue_from(const std::vector<std::string>& hosts,
                                        const InstanceMap& map, const std::vector<int>& field) {
  const Catalog& cat = Catalog::standard();
  std::vector<int> out;
  for (const std::string& host : hosts) {
    if (!cat.contains(host)) continue;
    for (int id : map.query_instances(cat.id(host), field)) {
      if (!map.was_visited(id)) out.push_back(id);
    }
  }
  return out;
}

std::vector<int> build_visit_queue(const std::string& item_category, const InstanceMap& map,
                                   const std::vector<int>& field,
                                   const std::vector<std::string>& excluded_hosts) {
  return build_visit_queue_from(predict_hosts(item_category, excluded_hosts), map, field);
}

InstanceSearch::InstanceSearch(std::string target_category, SearchConfig config)
    : target_(std::move(target_category)), config_(config) {}

std::optional<Action> InstanceSearch::next_action(InstanceMap& map, const AgentState& pose) {
  const Catalog& cat = Catalog::standard();
  // Inspection done (or given up): mark it off and pick the next candidate.
  const auto finish_current = [&](InstanceMap& m) {
    if (current_from_ranked_) ranked_visits_++;
    m.mark_visited(current_);
    current_ = -1;
    phase_ = Phase::Pick;
  };
  for (int guard = 0; guard < 8; ++guard) {
    if (phase_ == Phase::Pick) {
      DistanceField df = field_from(map, pose.cell);
      std::vector<std::string> hosts = config_.host_predictor
                                           ? config_.host_predictor(target_, excluded_hosts_)
                                           : predict_hosts(target_, excluded_hosts_);
      std::vector<int> queue = build_visit_queue_from(hosts, map, df.values);
      current_from_ranked_ = !queue.empty();
      if (queue.empty()) {
        if (config_.allow_reprediction && !repredicted_) {
          // The likeliest host category produced nothing; drop it and take
          // the rest of the list (instances mapped meanwhile included).
          repredicted_ = true;
          if (!hosts.empty()) {
            excluded_hosts_.push_back(hosts.front());
            continue;
          }
        }
        // Inspected ranked candidates and came up dry: the caller may want
        // to rethink the target before the broader stages below run.
        if (ranked_visits_ > 0) ranked_spent_ = true;
        // An item can sit on furniture the table never listed, so walk the
        // rest of the furniture before resorting to blind frontier
        // exploration. Blocking targets are furniture themselves and are
        // spotted from a distance; frontier coverage serves them better
        // than close-up inspections.
        if (!fallback_ && cat.contains(target_) &&
            !cat.info(cat.id(target_)).blocking) {
          fallback_ = true;
        }
        if (fallback_) queue = fallback_visit_queue(map, df.values);
        if (queue.empty()) return frontier_step(map, pose);
      }
      current_ = queue.front();
      ticks_on_current_ = 0;
      opened_ = false;
      phase_ = Phase::Approach;
    }

    if (!map.has_instance(current_)) {  // footprint got absorbed or dropped
      current_ = -1;
      phase_ = Phase::Pick;
      continue;
    }
    const MapInstance& host = map.instance(current_);
    if (++ticks_on_current_ > config_.per_instance_cap) {
      finish_current(map);
      continue;
    }

    switch (phase_) {
      case Phase::Pick:
        continue;  // unreachable; Pick handled above
      case Phase::Approach: {
        std::vector<Cell> foot = instance_footprint(host);
        if (distance_to_footprint(pose.cell, foot) <= kReach) {
          phase_ = Phase::Orient;
          continue;
        }
        std::vector<std::uint8_t> grid = map.optimistic_grid();
        std::vector<Cell> region = goal_region(grid, map.height(), map.width(), foot, kReach);
        if (region.empty()) {
          finish_current(map);
          continue;
        }
        DistanceField df = build_distance_field(grid, map.height(), map.width(), region);
        NavStep ns = next_nav_action(df, grid, pose.cell, pose.dir);
        if (ns.status == NavStep::Status::Step) return Action{ns.action};
        if (ns.status == NavStep::Status::Arrived) {
          phase_ = Phase::Orient;
          continue;
        }
        finish_current(map);  // unreachable from here
        continue;
      }
      case Phase::Orient: {
        bool facing = false;
        for (const MapCell& mc : host.cells) {
          if (in_view_cone(pose.cell, pose.dir, mc.cell)) facing = true;
        }
        if (!facing) return Action{ActionKind::RotateRight};
        phase_ = Phase::Align;
        continue;
      }
      case Phase::Align: {
        int want = instance_z(host) - map.z_levels() / 2;
        if (pose.pitch < want) return Action{ActionKind::LookUp};
        if (pose.pitch > want) return Action{ActionKind::LookDown};
        // Inspection sweep: one pitch below the host slice, back to it, one
        // above. Clamped at the pitch limits.
        sweep_plan_.clear();
        const int min_pitch = -(map.z_levels() / 2);
        const int max_pitch = map.z_levels() - 1 - map.z_levels() / 2;
        if (want > min_pitch) {
          sweep_plan_.push_back(ActionKind::LookDown);
          sweep_plan_.push_back(ActionKind::LookUp);
        }
        if (want < max_pitch) sweep_plan_.push_back(ActionKind::LookUp);
        bool openable = cat.info(host.category).openable;
        phase_ = openable && !opened_ ? Phase::OpenHost : Phase::Sweep;
        continue;
      }
      case Phase::OpenHost: {
        opened_ = true;
        phase_ = Phase::Sweep;
        Action a{ActionKind::Open};
        a.target_category = cat.name(host.category);
        return a;
      }
      case Phase::Sweep: {
        if (!sweep_plan_.empty()) {
          ActionKind k = sweep_plan_.front();
          sweep_plan_.erase(sweep_plan_.begin());
          return Action{k};
        }
        phase_ = Phase::Restore;
        continue;
      }
      case Phase::Restore: {
        if (pose.pitch < 0) return Action{ActionKind::LookUp};
        if (pose.pitch > 0) return Action{ActionKind::LookDown};
        finish_current(map);
        continue;
      }
    }
  }
  return frontier_step(map, pose);
}

std::optional<Action> InstanceSearch::frontier_step(const InstanceMap& map,
                                                    const AgentState& pose) {
  if (++frontier_ticks_ > kFrontierBudget) {
    exhausted_ = true;
    return std::nullopt;
  }
  if (pose.pitch != 0) {
    return Action{pose.pitch > 0 ? ActionKind::LookDown : ActionKind::LookUp};
  }
  std::vector<Cell> frontier = map.frontier_cells();
  if (frontier.empty()) {
    exhausted_ = true;
    return std::nullopt;
  }
  std::vector<std::uint8_t> grid = map.optimistic_grid();
  DistanceField df = build_distance_field(grid, map.height(), map.width(), frontier);
  NavStep ns = next_nav_action(df, grid, pose.cell, pose.dir);
  if (ns.status == NavStep::Status::Step) return Action{ns.action};
  if (ns.status == NavStep::Status::Arrived) return Action{ActionKind::RotateRight};
  exhausted_ = true;
  return std::nullopt;
}

HeatmapSearchStub::HeatmapSearchStub(std::string target_category)
    : target_(std::move(target_category)) {}

std::vector<int> HeatmapSearchStub::pool_counts(const InstanceMap& map) {
  const Catalog& cat = Catalog::standard();
  int ph = (map.height() + 7) / 8;
  int pw = (map.width() + 7) / 8;
  std::vector<int> counts(64, 0);
  for (const auto& [id, inst] : map.instances()) {
    if (!cat.info(inst.category).blocking) continue;
    for (const MapCell& mc : inst.cells) {
      int pr = mc.cell.row / ph;
      int pc = mc.cell.col / pw;
      if (pr < 0 || pr >= 8 || pc < 0 || pc >= 8) continue;
      ++counts[static_cast<std::size_t>(pr * 8 + pc)];
    }
  }
  return counts;
}

std::optional<Action> HeatmapSearchStub::next_action(InstanceMap& map, const AgentState& pose) {
  int ph = (map.height() + 7) / 8;
  int pw = (map.width() + 7) / 8;
  for (int guard = 0; guard < 3; ++guard) {
    if (current_pool_ == -1) {
      std::vector<int> counts = pool_counts(map);
      int best = -1, best_count = 0;
      for (int i = 0; i < 64; ++i) {
        if (std::find(visited_pools_.begin(), visited_pools_.end(), i) != visited_pools_.end())
          continue;
        if (counts[static_cast<std::size_t>(i)] > best_count) {  // row-major first peak
          best = i;
          best_count = counts[static_cast<std::size_t>(i)];
        }
      }
      if (best == -1) {
        exhausted_ = true;
        return std::nullopt;
      }
      current_pool_ = best;
      sweep_left_ = 0;
      ticks_on_current_ = 0;
    }

    if (++ticks_on_current_ > 60) {
      visited_pools_.push_back(current_pool_);
      current_pool_ = -1;
      continue;
    }
    if (sweep_left_ > 0) {
      --sweep_left_;
      if (sweep_left_ == 0) {
        visited_pools_.push_back(current_pool_);
        current_pool_ = -1;
      }
      return Action{ActionKind::RotateRight};
    }

    int pr = current_pool_ / 8, pc = current_pool_ % 8;
    std::vector<std::uint8_t> grid = map.optimistic_grid();
    std::vector<Cell> goals;
    for (int r = pr * ph; r < std::min(map.height(), (pr + 1) * ph); ++r) {
      for (int c = pc * pw; c < std::min(map.width(), (pc + 1) * pw); ++c) {
        Cell cell{r, c};
        if (map.occupancy(cell) == OccupancyState::Free) goals.push_back(cell);
      }
    }
    if (goals.empty()) {
      visited_pools_.push_back(current_pool_);
      current_pool_ = -1;
      continue;
    }
    DistanceField df = build_distance_field(grid, map.height(), map.width(), goals);
    NavStep ns = next_nav_action(df, grid, pose.cell, pose.dir);
    if (ns.status == NavStep::Status::Step) return Action{ns.action};
    if (ns.status == NavStep::Status::Arrived) {
      sweep_left_ = 4;
      continue;
    }
    visited_pools_.push_back(current_pool_);
    current_pool_ = -1;
  }
  exhausted_ = true;
  return std::nullopt;
}

}  // namespace triplan
