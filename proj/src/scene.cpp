#include "triplan/scene.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>

#include "triplan/rng.hpp"
#include "triplan/tables.hpp"

namespace triplan {

namespace {

struct Builder {
  const Catalog& cat = Catalog::standard();
  SceneProfile profile;
  int h = 0, w = 0;
  std::vector<std::uint8_t> walls;
  std::vector<std::uint8_t> solid;  // walls + furniture footprints
  std::vector<ObjectInstance> objects;

  std::size_t idx(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(w) +
           static_cast<std::size_t>(c.col);
  }
  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < h && c.col >= 0 && c.col < w; }
  bool free_cell(Cell c) const { return in_bounds(c) && !solid[idx(c)]; }

  int floor_component_size(Cell start) const {
    if (!free_cell(start)) return 0;
    std::vector<std::uint8_t> seen(walls.size(), 0);
    std::deque<Cell> q{start};
    seen[idx(start)] = 1;
    int n = 0;
    while (!q.empty()) {
      Cell c = q.front();
      q.pop_front();
      ++n;
      for (Direction d : {Direction::North, Direction::East, Direction::South, Direction::West}) {
        Cell nb = step_from(c, d);
        if (free_cell(nb) && !seen[idx(nb)]) {
          seen[idx(nb)] = 1;
          q.push_back(nb);
        }
      }
    }
    return n;
  }

  int total_free() const {
    int n = 0;
    for (auto v : solid) n += v == 0;
    return n;
  }

  bool connected() const {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (!solid[idx({r, c})]) return floor_component_size({r, c}) == total_free();
      }
    }
    return false;
  }
};

void lay_walls(Builder& b, Rng& rng) {
  for (int r = 0; r < b.h; ++r) {
    for (int c = 0; c < b.w; ++c) {
      if (r == 0 || c == 0 || r == b.h - 1 || c == b.w - 1) b.walls[b.idx({r, c})] = 1;
    }
  }
  // Straight partitions with door gaps keep the floor connected by
  // construction; connectivity is still verified after placement.
  int partitions = std::max(0, b.profile.rooms - 1);
  for (int p = 0; p < partitions; ++p) {
    bool vertical = rng.chance(0.5);
    if (vertical) {
      int col = rng.uniform_int(4, b.w - 5);
      int door = rng.uniform_int(1, b.h - 3);
      for (int r = 1; r < b.h - 1; ++r) {
        if (r == door || r == door + 1) continue;
        b.walls[b.idx({r, col})] = 1;
      }
    } else {
      int row = rng.uniform_int(4, b.h - 5);
      int door = rng.uniform_int(1, b.w - 3);
      for (int c = 1; c < b.w - 1; ++c) {
        if (c == door || c == door + 1) continue;
        b.walls[b.idx({row, c})] = 1;
      }
    }
  }
  b.solid = b.walls;
}

// Host height levels: vertical variety drives pitch-sensitive interactions.
int host_z(const std::string& name, Rng& rng, int z_levels) {
  int top = z_levels - 1;
  if (name == "Cabinet" || name == "Shelf") return rng.uniform_int(0, top);
  if (name == "Drawer") return rng.uniform_int(0, std::min(1, top));
  if (name == "Fridge" || name == "Microwave") return std::min(rng.uniform_int(1, 2), top);
  if (name == "Sofa" || name == "ArmChair" || name == "GarbageCan" || name == "Safe")
    return 0;
  return std::min(1, top);  // counters, tables, sink, lamps
}

bool try_place_furniture(Builder& b, Rng& rng, CategoryId cid, int z) {
  // 1x1 or 1x2 footprint against a random free spot; reject placements that
  // disconnect the floor or seal any item host away from the agent.
  for (int attempt = 0; attempt < 64; ++attempt) {
    Cell base{rng.uniform_int(1, b.h - 2), rng.uniform_int(1, b.w - 2)};
    bool two = rng.chance(0.4);
    bool horiz = rng.chance(0.5);
    std::vector<Cell> cells{base};
    if (two) cells.push_back(horiz ? Cell{base.row, base.col + 1} : Cell{base.row + 1, base.col});
    bool ok = true;
    for (Cell c : cells) {
      if (!b.free_cell(c)) ok = false;
    }
    if (!ok) continue;
    for (Cell c : cells) b.solid[b.idx(c)] = 1;
    // A host must keep at least one free neighbor so it stays reachable.
    bool reachable = false;
    for (Cell c : cells) {
      for (Direction d : {Direction::North, Direction::East, Direction::South, Direction::West}) {
        if (b.free_cell(step_from(c, d))) reachable = true;
      }
    }
    if (!reachable || !b.connected()) {
      for (Cell c : cells) b.solid[b.idx(c)] = 0;
      continue;
    }
    std::sort(cells.begin(), cells.end());
    ObjectInstance obj;
    obj.id = static_cast<ObjectId>(b.objects.size());
    obj.category = cid;
    obj.footprint = cells;
    obj.z = z;
    b.objects.push_back(std::move(obj));
    return true;
  }
  return false;
}

std::vector<std::string> default_extra_hosts() {
  return {"Cabinet", "Cabinet",  "Drawer",   "Shelf",    "CounterTop", "DiningTable",
          "Desk",    "SideTable", "Sofa",    "ArmChair", "GarbageCan", "Safe"};
}

}  // namespace

SceneProfile named_profile(const std::string& name) {
  SceneProfile p;
  p.name = name;
  if (name == "default") return p;
  if (name == "occlusion_heavy") {
    p.occlusion_rate = 1.0;
    return p;
  }
  if (name == "half_hidden") {
    p.occlusion_rate = 0.5;
    return p;
  }
  if (name == "single_host") {
    p.occlusion_rate = 1.0;
    p.single_openable_class = true;
    p.rooms = 1;
    return p;
  }
  if (name == "sparse") {
    p.rooms = 1;
    p.min_furniture = 8;
    p.max_furniture = 10;
    p.min_items = 6;
    p.max_items = 8;
    return p;
  }
  throw ProfileInfeasible("unknown profile name: " + name);
}

Scene generate_scene(std::uint64_t seed, const SceneProfile& profile) {
  const Catalog& cat = Catalog::standard();
  if (profile.height < 8 || profile.width < 8) {
    throw ProfileInfeasible("grid must be at least 8x8");
  }
  if (profile.z_levels < 1 || profile.z_levels > 5) {
    throw ProfileInfeasible("z_levels must be in [1,5]");
  }

  for (int attempt = 0; attempt < 32; ++attempt) {
    Rng rng(derive_seed(seed, 0x5ce0e9u + static_cast<std::uint64_t>(attempt)));
    Builder b;
    b.profile = profile;
    b.h = profile.height;
    b.w = profile.width;
    b.walls.assign(static_cast<std::size_t>(b.h) * static_cast<std::size_t>(b.w), 0);
    lay_walls(b, rng);

    // Mandatory appliances/hosts first, then a random mix up to the budget.
    std::vector<std::string> mandatory = {"Sink",       "Microwave", "Fridge",
                                          "FloorLamp",  "CounterTop", "Cabinet",
                                          "Cabinet",     "GarbageCan"};
    if (profile.single_openable_class) {
      mandatory = {"Sink", "FloorLamp", "CounterTop", "Cabinet", "Cabinet", "Cabinet"};
    }
    std::vector<std::string> pool =
        profile.furniture_classes.empty() ? default_extra_hosts() : profile.furniture_classes;
    if (profile.single_openable_class) pool = {"Cabinet", "CounterTop", "SideTable", "Shelf"};

    int budget = rng.uniform_int(profile.min_furniture, profile.max_furniture);
    bool placed_all = true;
    for (const std::string& name : mandatory) {
      if (!try_place_furniture(b, rng, cat.id(name), host_z(name, rng, profile.z_levels))) {
        placed_all = false;
        break;
      }
    }
    if (!placed_all) continue;
    while (static_cast<int>(b.objects.size()) < budget) {
      std::string name = rng.pick(pool);
      if (profile.single_openable_class && cat.info(cat.id(name)).openable && name != "Cabinet")
        continue;
      try_place_furniture(b, rng, cat.id(name), host_z(name, rng, profile.z_levels));
      if (static_cast<int>(b.objects.size()) >= 40) break;
    }

    // Slot capacity: one item per host footprint cell.
    std::vector<ObjectId> openable_hosts, surface_hosts;
    int openable_slots = 0, surface_slots = 0;
    for (const auto& o : b.objects) {
      const auto& info = cat.info(o.category);
      if (info.openable) {
        openable_hosts.push_back(o.id);
        openable_slots += static_cast<int>(o.footprint.size());
      } else if (info.surface) {
        surface_hosts.push_back(o.id);
        surface_slots += static_cast<int>(o.footprint.size());
      }
    }
    if (openable_hosts.empty() || surface_hosts.empty()) continue;

    int item_count = rng.uniform_int(profile.min_items, profile.max_items);
    if (item_count > openable_slots + surface_slots) {
      throw ProfileInfeasible("item count exceeds receptacle capacity");
    }

    // Pick item categories; guarantee a duplicate pair when asked so the
    // two-object task type stays samplable.
    std::vector<CategoryId> item_cats = cat.items();
    std::vector<CategoryId> chosen;
    for (int i = 0; i < item_count; ++i) chosen.push_back(rng.pick(item_cats));
    if (profile.ensure_duplicate_item && item_count >= 2) chosen[1] = chosen[0];

    auto slot_of = [&](ObjectId host_id) -> std::optional<Cell> {
      const auto& host = b.objects[static_cast<std::size_t>(host_id)];
      for (Cell c : host.footprint) {
        bool taken = false;
        for (const auto& o : b.objects) {
          if (o.container == host_id && o.cell() == c) taken = true;
        }
        if (!taken) return c;
      }
      return std::nullopt;
    };

    // When the affinity coin passes, an item lands in the likeliest of its
    // habitual hosts that still has room; otherwise any host will do.
    const CooccurrenceTable& cooc = CooccurrenceTable::builtin();
    auto affinity_order = [&](std::vector<ObjectId>& hosts, CategoryId item) {
      const std::string& iname = cat.name(item);
      if (!cooc.has(iname)) return;
      const auto& ranked = cooc.hosts_for(iname);
      auto weight = [&](ObjectId hid) {
        const std::string& hname = cat.name(b.objects[static_cast<std::size_t>(hid)].category);
        for (const HostEntry& e : ranked) {
          if (e.host == hname) return e.weight;
        }
        return 0.0;
      };
      std::stable_sort(hosts.begin(), hosts.end(),
                       [&](ObjectId x, ObjectId y) { return weight(x) > weight(y); });
    };

    bool items_ok = true;
    for (CategoryId icat : chosen) {
      bool hide = rng.chance(profile.occlusion_rate);
      // Drawn for every item so the stream stays aligned across profiles.
      bool prefer = rng.chance(profile.host_affinity);
      // Hard rates (0 and 1) are honored exactly; in between, overflow may
      // spill into the other pool.
      bool may_spill = profile.occlusion_rate > 0.0 && profile.occlusion_rate < 1.0;
      std::vector<ObjectId>& primary = hide ? openable_hosts : surface_hosts;
      std::vector<ObjectId>& fallback = hide ? surface_hosts : openable_hosts;
      std::optional<Cell> slot;
      ObjectId host_id = kNoObject;
      std::vector<ObjectId> order = primary;
      rng.shuffle(order);
      if (prefer) affinity_order(order, icat);
      for (ObjectId hid : order) {
        slot = slot_of(hid);
        if (slot) {
          host_id = hid;
          break;
        }
      }
      if (!slot && may_spill) {
        std::vector<ObjectId> order2 = fallback;
        rng.shuffle(order2);
        if (prefer) affinity_order(order2, icat);
        for (ObjectId hid : order2) {
          slot = slot_of(hid);
          if (slot) {
            host_id = hid;
            break;
          }
        }
      }
      if (!slot) {
        items_ok = false;
        break;
      }
      ObjectInstance item;
      item.id = static_cast<ObjectId>(b.objects.size());
      item.category = icat;
      item.footprint = {*slot};
      const auto& host = b.objects[static_cast<std::size_t>(host_id)];
      item.z = host.z;
      item.container = host_id;
      b.objects.push_back(std::move(item));
    }
    if (!items_ok) continue;

    // Agent start: any free cell, random heading.
    std::vector<Cell> free_cells;
    for (int r = 0; r < b.h; ++r) {
      for (int c = 0; c < b.w; ++c) {
        if (!b.solid[b.idx({r, c})]) free_cells.push_back({r, c});
      }
    }
    if (free_cells.size() < 16) continue;

    Scene s;
    s.seed = seed;
    s.profile = profile;
    s.height = b.h;
    s.width = b.w;
    s.z_levels = profile.z_levels;
    s.walls = b.walls;
    s.objects = b.objects;
    s.agent_start = rng.pick(free_cells);
    s.agent_dir = static_cast<Direction>(rng.uniform_int(0, 3));
    return s;
  }
  throw ProfileInfeasible("could not realize profile '" + profile.name + "' in 32 attempts");
}

}  // namespace triplan
