#include "triplan/instance_map.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include <json.hpp>

namespace triplan {

using nlohmann::json;

InstanceMap::InstanceMap(int height, int width, int z_levels)
    : height_(height), width_(width), z_levels_(z_levels) {
  std::size_t plane = static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  layer_.assign(static_cast<std::size_t>(Catalog::standard().size()) *
                    static_cast<std::size_t>(z_levels_) * plane,
                -1);
  occupancy_.assign(plane, static_cast<std::uint8_t>(OccupancyState::Unknown));
  explored_.assign(plane, 0);
}

std::size_t InstanceMap::layer_index(CategoryId cat, const MapCell& mc) const {
  std::size_t plane = static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  return (static_cast<std::size_t>(cat) * static_cast<std::size_t>(z_levels_) +
          static_cast<std::size_t>(mc.z)) *
             plane +
         grid_index(mc.cell);
}

std::vector<ProjectedMask> InstanceMap::project(const Observation& obs) {
  Cell hd = delta(obs.pose.dir);
  Cell lt = delta(rotate_left(obs.pose.dir));
  std::map<int, ProjectedMask> masks;
  for (const Pixel& p : obs.pixels) {
    double f = p.depth * std::cos(p.azimuth);
    double l = p.depth * std::sin(p.azimuth);
    Cell cell{obs.pose.cell.row + static_cast<int>(std::lround(f * hd.row + l * lt.row)),
              obs.pose.cell.col + static_cast<int>(std::lround(f * hd.col + l * lt.col))};
    int z = static_cast<int>(std::floor(p.height));
    auto [it, inserted] = masks.try_emplace(p.local_mask_id);
    if (inserted) {
      it->second.local_mask_id = p.local_mask_id;
      it->second.category = p.category;
      it->second.true_instance = p.instance_id;
    }
    it->second.cells.push_back({cell, z});
  }
  std::vector<ProjectedMask> out;
  for (auto& [id, m] : masks) {
    std::sort(m.cells.begin(), m.cells.end());
    m.cells.erase(std::unique(m.cells.begin(), m.cells.end()), m.cells.end());
    out.push_back(std::move(m));
  }
  return out;
}

void InstanceMap::assign_cell(CategoryId cat, const MapCell& mc, int id) {
  int& slot = layer_[layer_index(cat, mc)];
  if (slot == id) return;
  if (slot != -1) {
    MapInstance& loser = instances_.at(slot);
    std::erase(loser.cells, mc);
    if (loser.cells.empty()) instances_.erase(slot);
  }
  slot = id;
}

void InstanceMap::update(const Observation& obs, double theta) {
  const Catalog& cat = Catalog::standard();
  std::vector<ProjectedMask> masks = project(obs);

  // Carve occupancy: floors first, blocking categories afterwards so a real
  // obstacle is never erased by a noisy floor sample in the same frame.
  for (const ProjectedMask& m : masks) {
    if (m.category != cat.floor()) continue;
    for (const MapCell& mc : m.cells) {
      if (!in_bounds(mc.cell)) continue;
      occupancy_[grid_index(mc.cell)] = static_cast<std::uint8_t>(OccupancyState::Free);
      explored_[grid_index(mc.cell)] = 1;
    }
  }
  for (const ProjectedMask& m : masks) {
    bool blocks = m.category == cat.wall() || cat.info(m.category).blocking;
    for (const MapCell& mc : m.cells) {
      if (!in_bounds(mc.cell)) continue;
      explored_[grid_index(mc.cell)] = 1;
      if (blocks) {
        occupancy_[grid_index(mc.cell)] = static_cast<std::uint8_t>(OccupancyState::Blocked);
      }
    }
  }

  // Stand-on evidence last: the agent's own cell is free no matter what a
  // noisy ray painted onto it this frame.
  if (in_bounds(obs.pose.cell)) {
    occupancy_[grid_index(obs.pose.cell)] = static_cast<std::uint8_t>(OccupancyState::Free);
    explored_[grid_index(obs.pose.cell)] = 1;
  }

  // Instance matching for object masks, ascending mask id.
  for (const ProjectedMask& m : masks) {
    if (m.category == cat.wall() || m.category == cat.floor()) continue;
    std::vector<MapCell> foot;
    for (const MapCell& mc : m.cells) {
      if (in_bounds(mc.cell) && mc.z >= 0 && mc.z < z_levels_) foot.push_back(mc);
    }
    if (foot.empty()) continue;

    // Best-overlap instance of the same category; exact ratio comparison,
    // smallest id wins ties.
    int best = -1;
    long long best_inter = 0, best_union = 1;
    for (const auto& [id, inst] : instances_) {
      if (inst.category != m.category) continue;
      long long inter = 0;
      for (const MapCell& mc : foot) {
        if (std::binary_search(inst.cells.begin(), inst.cells.end(), mc)) ++inter;
      }
      long long uni =
          static_cast<long long>(foot.size()) + static_cast<long long>(inst.cells.size()) - inter;
      if (best == -1 || inter * best_union > best_inter * uni) {
        best = id;
        best_inter = inter;
        best_union = uni;
      }
    }
    bool matched =
        best != -1 && static_cast<double>(best_inter) > theta * static_cast<double>(best_union);

    int id;
    if (matched) {
      id = best;
    } else {
      id = next_id_++;
      MapInstance inst;
      inst.id = id;
      inst.category = m.category;
      instances_.emplace(id, inst);
    }
    for (const MapCell& mc : foot) assign_cell(m.category, mc, id);
    MapInstance& inst = instances_.at(id);
    std::vector<MapCell> merged = inst.cells;
    merged.insert(merged.end(), foot.begin(), foot.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    inst.cells = std::move(merged);
    inst.last_seen_step = obs.step_index;
  }
}

std::vector<int> InstanceMap::instances_of(CategoryId category) const {
  std::vector<int> out;
  for (const auto& [id, inst] : instances_) {
    if (inst.category == category) out.push_back(id);
  }
  return out;
}

std::vector<int> InstanceMap::query_instances(CategoryId category,
                                              const std::vector<int>& field) const {
  struct Entry {
    int dist;
    int id;
  };
  std::vector<Entry> entries;
  for (const auto& [id, inst] : instances_) {
    if (inst.category != category) continue;
    int best = INT_MAX;
    for (const MapCell& mc : inst.cells) {
      for (Direction d : {Direction::North, Direction::East, Direction::South, Direction::West}) {
        Cell nb = step_from(mc.cell, d);
        if (!in_bounds(nb)) continue;
        if (occupancy(nb) == OccupancyState::Blocked) continue;
        int v = field[grid_index(nb)];
        best = std::min(best, v);
      }
    }
    entries.push_back({best, id});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  });
  std::vector<int> out;
  for (const Entry& e : entries) out.push_back(e.id);
  return out;
}

void InstanceMap::mark_blocked(Cell c) {
  if (!in_bounds(c)) return;
  occupancy_[grid_index(c)] = static_cast<std::uint8_t>(OccupancyState::Blocked);
  explored_[grid_index(c)] = 1;
}

OccupancyState InstanceMap::occupancy(Cell c) const {
  if (!in_bounds(c)) return OccupancyState::Blocked;
  return static_cast<OccupancyState>(occupancy_[grid_index(c)]);
}

bool InstanceMap::explored(Cell c) const { return in_bounds(c) && explored_[grid_index(c)] != 0; }

std::vector<std::uint8_t> InstanceMap::free_grid() const {
  std::vector<std::uint8_t> g(occupancy_.size(), 0);
  for (std::size_t i = 0; i < occupancy_.size(); ++i) {
    g[i] = occupancy_[i] == static_cast<std::uint8_t>(OccupancyState::Free) ? 1 : 0;
  }
  return g;
}

std::vector<std::uint8_t> InstanceMap::optimistic_grid() const {
  std::vector<std::uint8_t> g(occupancy_.size(), 0);
  for (std::size_t i = 0; i < occupancy_.size(); ++i) {
    g[i] = occupancy_[i] == static_cast<std::uint8_t>(OccupancyState::Blocked) ? 0 : 1;
  }
  return g;
}

std::vector<Cell> InstanceMap::frontier_cells() const {
  std::vector<Cell> out;
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      Cell cell{r, c};
      if (occupancy(cell) != OccupancyState::Free) continue;
      bool edge = false;
      for (Direction d : {Direction::North, Direction::East, Direction::South, Direction::West}) {
        Cell nb = step_from(cell, d);
        if (in_bounds(nb) && !explored(nb)) edge = true;
      }
      if (edge) out.push_back(cell);
    }
  }
  return out;
}

std::string InstanceMap::to_json() const {
  json j;
  j["schema_version"] = 1;
  j["height"] = height_;
  j["width"] = width_;
  j["z_levels"] = z_levels_;
  j["next_id"] = next_id_;
  json insts = json::array();
  for (const auto& [id, inst] : instances_) {
    json cells = json::array();
    for (const MapCell& mc : inst.cells) {
      cells.push_back(json::array({mc.cell.row, mc.cell.col, mc.z}));
    }
    insts.push_back({{"id", inst.id},
                     {"category", Catalog::standard().name(inst.category)},
                     {"cells", cells},
                     {"last_seen_step", inst.last_seen_step}});
  }
  j["instances"] = insts;
  j["occupancy"] = occupancy_;
  j["explored"] = explored_;
  j["visited"] = std::vector<int>(visited_.begin(), visited_.end());
  return j.dump();
}

InstanceMap InstanceMap::from_json(const std::string& text) {
  json j = json::parse(text);
  InstanceMap m(j.at("height").get<int>(), j.at("width").get<int>(), j.at("z_levels").get<int>());
  m.next_id_ = j.at("next_id").get<int>();
  for (const auto& ji : j.at("instances")) {
    MapInstance inst;
    inst.id = ji.at("id").get<int>();
    inst.category = Catalog::standard().id(ji.at("category").get<std::string>());
    for (const auto& jc : ji.at("cells")) {
      MapCell mc{{jc.at(0).get<int>(), jc.at(1).get<int>()}, jc.at(2).get<int>()};
      inst.cells.push_back(mc);
      m.layer_[m.layer_index(inst.category, mc)] = inst.id;
    }
    inst.last_seen_step = ji.at("last_seen_step").get<int>();
    m.instances_.emplace(inst.id, inst);
  }
  m.occupancy_ = j.at("occupancy").get<std::vector<std::uint8_t>>();
  m.explored_ = j.at("explored").get<std::vector<std::uint8_t>>();
  for (int id : j.at("visited").get<std::vector<int>>()) m.visited_.insert(id);
  return m;
}

}  // namespace triplan
