#include "triplan/task.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "triplan/rng.hpp"
#include "triplan/tables.hpp"

namespace triplan {

const char* to_string(TaskType t) {
  switch (t) {
    case TaskType::PickAndPlace: return "PickAndPlace";
    case TaskType::PickTwoAndPlace: return "PickTwoAndPlace";
    case TaskType::CleanAndPlace: return "CleanAndPlace";
    case TaskType::HeatAndPlace: return "HeatAndPlace";
    case TaskType::CoolAndPlace: return "CoolAndPlace";
    case TaskType::ExamineInLight: return "ExamineInLight";
    case TaskType::PlaceInReceptacle: return "PlaceInReceptacle";
  }
  return "?";
}

std::optional<TaskType> task_type_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(TaskType::PlaceInReceptacle); ++i) {
    TaskType t = static_cast<TaskType>(i);
    if (s == to_string(t)) return t;
  }
  return std::nullopt;
}

const char* to_string(PredicateKind k) {
  switch (k) {
    case PredicateKind::InReceptacle: return "InReceptacle";
    case PredicateKind::Cleaned: return "Cleaned";
    case PredicateKind::Heated: return "Heated";
    case PredicateKind::Cooled: return "Cooled";
    case PredicateKind::Holding: return "Holding";
    case PredicateKind::ToggledOn: return "ToggledOn";
  }
  return "?";
}

namespace {

bool item_hidden(const Scene& scene, const ObjectInstance& item) {
  if (item.container == kNoObject) return false;
  const auto& host = scene.objects[static_cast<std::size_t>(item.container)];
  return Catalog::standard().info(host.category).openable && !host.open;
}

struct Candidates {
  std::map<std::string, int> item_counts;          // category -> instances
  std::map<std::string, int> hidden_counts;
  std::set<std::string> surface_recep;             // non-openable hosts with capacity
  std::set<std::string> openable_recep;
  std::set<std::string> lamps;
};

Candidates collect(const Scene& scene) {
  const Catalog& cat = Catalog::standard();
  Candidates out;
  std::map<ObjectId, int> load;  // items per host
  for (const auto& o : scene.objects) {
    if (o.container != kNoObject) ++load[o.container];
  }
  for (const auto& o : scene.objects) {
    const auto& info = cat.info(o.category);
    if (info.pickupable) {
      ++out.item_counts[info.name];
      if (item_hidden(scene, o)) ++out.hidden_counts[info.name];
    } else if (info.toggleable) {
      out.lamps.insert(info.name);
    } else if (info.surface || info.openable) {
      bool has_free = static_cast<int>(o.footprint.size()) > load[o.id];
      if (!has_free) continue;
      if (info.openable) {
        out.openable_recep.insert(info.name);
      } else {
        out.surface_recep.insert(info.name);
      }
    }
  }
  return out;
}

std::string pick_sorted(Rng& rng, const std::set<std::string>& set) {
  std::vector<std::string> v(set.begin(), set.end());
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

std::string article(const std::string& noun) {
  char c = static_cast<char>(std::tolower(noun.front()));
  return (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') ? "an" : "a";
}

}  // namespace

TaskSpec sample_task(const Scene& scene, std::uint64_t seed, const TaskOptions& options) {
  const Catalog& cat = Catalog::standard();
  Rng rng(derive_seed(seed, 0x7a5cu));
  Candidates cand = collect(scene);
  if (cand.item_counts.empty()) throw TaskInfeasible("scene has no items");

  auto items_with = [&](auto pred, bool hidden_only) {
    std::vector<std::string> out;
    for (const auto& [name, count] : cand.item_counts) {
      if (!pred(cat.info(cat.id(name)))) continue;
      if (hidden_only && cand.hidden_counts[name] == 0) continue;
      out.push_back(name);
    }
    return out;
  };
  auto any_item = [](const CategoryInfo&) { return true; };

  // Which task types are feasible against this scene?
  std::vector<TaskType> feasible;
  auto consider = [&](TaskType t, bool ok) {
    if (!ok) return;
    if (options.force_type && *options.force_type != t) return;
    feasible.push_back(t);
  };
  bool have_surface = !cand.surface_recep.empty();
  bool have_open = !cand.openable_recep.empty();
  auto nonempty = [&](auto pred) { return !items_with(pred, options.force_hidden_target).empty(); };

  consider(TaskType::PickAndPlace, have_surface && nonempty(any_item));
  {
    bool dup = false;
    for (const auto& [name, count] : cand.item_counts) {
      if (count < 2) continue;
      if (options.force_hidden_target && cand.hidden_counts[name] < 2) continue;
      dup = true;
    }
    consider(TaskType::PickTwoAndPlace, have_surface && dup);
  }
  consider(TaskType::CleanAndPlace,
           have_surface && cand.item_counts.size() > 0 &&
               nonempty([](const CategoryInfo& i) { return i.cleanable; }) &&
               !items_with(any_item, false).empty() &&
               [&] {
                 for (const auto& o : scene.objects)
                   if (cat.name(o.category) == "Sink") return true;
                 return false;
               }());
  consider(TaskType::HeatAndPlace,
           have_surface && nonempty([](const CategoryInfo& i) { return i.heatable; }) && [&] {
             for (const auto& o : scene.objects)
               if (cat.name(o.category) == "Microwave") return true;
             return false;
           }());
  consider(TaskType::CoolAndPlace,
           have_surface && nonempty([](const CategoryInfo& i) { return i.coolable; }) && [&] {
             for (const auto& o : scene.objects)
               if (cat.name(o.category) == "Fridge") return true;
             return false;
           }());
  consider(TaskType::ExamineInLight, !cand.lamps.empty() && nonempty(any_item));
  consider(TaskType::PlaceInReceptacle, have_open && nonempty(any_item));

  if (feasible.empty()) throw TaskInfeasible("no feasible task type for scene");
  TaskType type = feasible[static_cast<std::size_t>(rng.below(feasible.size()))];

  auto choose_item = [&](auto pred, int min_count) -> std::string {
    std::vector<std::string> pool;
    for (const auto& [name, count] : cand.item_counts) {
      if (!pred(cat.info(cat.id(name)))) continue;
      int usable = options.force_hidden_target ? cand.hidden_counts[name] : count;
      if (usable >= min_count) pool.push_back(name);
    }
    if (pool.empty()) throw TaskInfeasible("no item candidates");
    return pool[static_cast<std::size_t>(rng.below(pool.size()))];
  };

  TaskSpec task;
  task.type = type;
  std::string real_target;
  switch (type) {
    case TaskType::PickAndPlace:
      real_target = choose_item(any_item, 1);
      task.receptacle_category = pick_sorted(rng, cand.surface_recep);
      break;
    case TaskType::PickTwoAndPlace:
      real_target = choose_item(any_item, 2);
      task.receptacle_category = pick_sorted(rng, cand.surface_recep);
      break;
    case TaskType::CleanAndPlace:
      real_target = choose_item([](const CategoryInfo& i) { return i.cleanable; }, 1);
      task.receptacle_category = pick_sorted(rng, cand.surface_recep);
      break;
    case TaskType::HeatAndPlace:
      real_target = choose_item([](const CategoryInfo& i) { return i.heatable; }, 1);
      task.receptacle_category = pick_sorted(rng, cand.surface_recep);
      break;
    case TaskType::CoolAndPlace:
      real_target = choose_item([](const CategoryInfo& i) { return i.coolable; }, 1);
      task.receptacle_category = pick_sorted(rng, cand.surface_recep);
      break;
    case TaskType::ExamineInLight:
      real_target = choose_item(any_item, 1);
      task.receptacle_category = pick_sorted(rng, cand.lamps);
      break;
    case TaskType::PlaceInReceptacle:
      real_target = choose_item(any_item, 1);
      task.receptacle_category = pick_sorted(rng, cand.openable_recep);
      break;
  }

  // The instruction may name the target by a synonym the scene does not
  // contain; goal conditions keep the real category.
  task.target_category = real_target;
  if (options.alias_prob > 0.0 && rng.chance(options.alias_prob)) {
    const SynonymTable& syn = SynonymTable::builtin();
    std::vector<std::string> aliases;
    for (const auto& [a, b] : syn.pairs) {
      std::string other = (a == real_target) ? b : (b == real_target ? a : "");
      if (other.empty() || !cat.contains(other)) continue;
      if (cand.item_counts.count(other)) continue;  // alias must be absent
      aliases.push_back(other);
    }
    std::sort(aliases.begin(), aliases.end());
    if (!aliases.empty())
      task.target_category = aliases[static_cast<std::size_t>(rng.below(aliases.size()))];
  }

  const std::string& x = task.target_category;
  const std::string& y = task.receptacle_category;
  auto gc = [&](PredicateKind k, const std::string& obj, const std::string& rec, int n) {
    Predicate p;
    p.kind = k;
    p.object_category = obj;
    p.receptacle_category = rec;
    p.min_count = n;
    task.goal_conditions.push_back(p);
  };

  switch (type) {
    case TaskType::PickAndPlace:
      task.instruction_text = "put " + article(x) + " " + x + " on the " + y;
      task.step_by_step = {"find the " + x, "pick up the " + x, "go to the " + y,
                           "put the " + x + " on the " + y};
      gc(PredicateKind::InReceptacle, real_target, y, 1);
      break;
    case TaskType::PickTwoAndPlace:
      task.instruction_text = "put two " + x + "s on the " + y;
      task.step_by_step = {"find the first " + x,  "pick it up", "put it on the " + y,
                           "find the second " + x, "pick it up", "put it on the " + y};
      gc(PredicateKind::InReceptacle, real_target, y, 1);
      gc(PredicateKind::InReceptacle, real_target, y, 2);
      break;
    case TaskType::CleanAndPlace:
      task.instruction_text = "put a clean " + x + " on the " + y;
      task.step_by_step = {"find the " + x, "pick it up", "rinse it at the sink",
                           "put it on the " + y};
      gc(PredicateKind::Cleaned, real_target, "", 1);
      gc(PredicateKind::InReceptacle, real_target, y, 1);
      break;
    case TaskType::HeatAndPlace:
      task.instruction_text = "put a heated " + x + " on the " + y;
      task.step_by_step = {"find the " + x, "pick it up", "heat it in the microwave",
                           "put it on the " + y};
      gc(PredicateKind::Heated, real_target, "", 1);
      gc(PredicateKind::InReceptacle, real_target, y, 1);
      break;
    case TaskType::CoolAndPlace:
      task.instruction_text = "put a chilled " + x + " on the " + y;
      task.step_by_step = {"find the " + x, "pick it up", "chill it in the fridge",
                           "put it on the " + y};
      gc(PredicateKind::Cooled, real_target, "", 1);
      gc(PredicateKind::InReceptacle, real_target, y, 1);
      break;
    case TaskType::ExamineInLight:
      task.instruction_text = "examine the " + x + " under the " + y;
      task.step_by_step = {"find the " + x, "pick it up", "turn on the " + y};
      gc(PredicateKind::Holding, real_target, "", 1);
      gc(PredicateKind::ToggledOn, y, "", 1);
      break;
    case TaskType::PlaceInReceptacle:
      task.instruction_text = "put " + article(x) + " " + x + " in the " + y;
      task.step_by_step = {"find the " + x, "pick up the " + x, "go to the " + y,
                           "put the " + x + " in the " + y};
      gc(PredicateKind::InReceptacle, real_target, y, 1);
      break;
  }
  return task;
}

}  // namespace triplan
