#include "triplan/json_io.hpp"

#include <json.hpp>

#include <stdexcept>

namespace triplan {

using nlohmann::json;

namespace {

json cell_to_json(Cell c) { return json::array({c.row, c.col}); }

Cell cell_from_json(const json& j) {
  return Cell{j.at(0).get<int>(), j.at(1).get<int>()};
}

void require_version(const json& j, int expected) {
  const int got = j.at("schema_version").get<int>();
  if (got != expected) {
    throw std::runtime_error("unsupported schema_version " + std::to_string(got));
  }
}

json object_to_json(const ObjectInstance& o) {
  const auto& cat = Catalog::standard();
  json cells = json::array();
  for (Cell c : o.footprint) cells.push_back(cell_to_json(c));
  json j = {
      {"id", o.id},
      {"category", cat.name(o.category)},
      {"footprint", std::move(cells)},
      {"z", o.z},
      {"container", o.container},
  };
  // Flags are sparse; only non-default values are written.
  if (o.open) j["open"] = true;
  if (o.toggled_on) j["toggled_on"] = true;
  if (o.cleaned) j["cleaned"] = true;
  if (o.heated) j["heated"] = true;
  if (o.cooled) j["cooled"] = true;
  if (o.sliced) j["sliced"] = true;
  if (o.held) j["held"] = true;
  return j;
}

ObjectInstance object_from_json(const json& j) {
  const auto& cat = Catalog::standard();
  ObjectInstance o;
  o.id = j.at("id").get<int>();
  o.category = cat.id(j.at("category").get<std::string>());
  for (const auto& c : j.at("footprint")) o.footprint.push_back(cell_from_json(c));
  o.z = j.at("z").get<int>();
  o.container = j.at("container").get<int>();
  o.open = j.value("open", false);
  o.toggled_on = j.value("toggled_on", false);
  o.cleaned = j.value("cleaned", false);
  o.heated = j.value("heated", false);
  o.cooled = j.value("cooled", false);
  o.sliced = j.value("sliced", false);
  o.held = j.value("held", false);
  return o;
}

json profile_to_json_obj(const SceneProfile& p) {
  return json{
      {"name", p.name},
      {"height", p.height},
      {"width", p.width},
      {"z_levels", p.z_levels},
      {"rooms", p.rooms},
      {"min_furniture", p.min_furniture},
      {"max_furniture", p.max_furniture},
      {"min_items", p.min_items},
      {"max_items", p.max_items},
      {"occlusion_rate", p.occlusion_rate},
      {"host_affinity", p.host_affinity},
      {"furniture_classes", p.furniture_classes},
      {"single_openable_class", p.single_openable_class},
      {"ensure_duplicate_item", p.ensure_duplicate_item},
  };
}

SceneProfile profile_from_json_obj(const json& j) {
  SceneProfile p;
  p.name = j.value("name", p.name);
  p.height = j.value("height", p.height);
  p.width = j.value("width", p.width);
  p.z_levels = j.value("z_levels", p.z_levels);
  p.rooms = j.value("rooms", p.rooms);
  p.min_furniture = j.value("min_furniture", p.min_furniture);
  p.max_furniture = j.value("max_furniture", p.max_furniture);
  p.min_items = j.value("min_items", p.min_items);
  p.max_items = j.value("max_items", p.max_items);
  p.occlusion_rate = j.value("occlusion_rate", p.occlusion_rate);
  p.host_affinity = j.value("host_affinity", p.host_affinity);
  p.furniture_classes = j.value("furniture_classes", p.furniture_classes);
  p.single_openable_class = j.value("single_openable_class", p.single_openable_class);
  p.ensure_duplicate_item = j.value("ensure_duplicate_item", p.ensure_duplicate_item);
  return p;
}

json predicate_to_json(const Predicate& p) {
  return json{
      {"kind", to_string(p.kind)},
      {"object_category", p.object_category},
      {"receptacle_category", p.receptacle_category},
      {"min_count", p.min_count},
  };
}

Predicate predicate_from_json(const json& j) {
  static const std::map<std::string, PredicateKind> kKinds = {
      {"InReceptacle", PredicateKind::InReceptacle}, {"Cleaned", PredicateKind::Cleaned},
      {"Heated", PredicateKind::Heated},             {"Cooled", PredicateKind::Cooled},
      {"Holding", PredicateKind::Holding},           {"ToggledOn", PredicateKind::ToggledOn},
  };
  Predicate p;
  p.kind = kKinds.at(j.at("kind").get<std::string>());
  p.object_category = j.at("object_category").get<std::string>();
  p.receptacle_category = j.value("receptacle_category", std::string{});
  p.min_count = j.value("min_count", 1);
  return p;
}

}  // namespace

std::string scene_to_json(const Scene& s) {
  json objs = json::array();
  for (const auto& o : s.objects) objs.push_back(object_to_json(o));
  json j = {
      {"schema_version", s.schema_version},
      {"seed", s.seed},
      {"profile", profile_to_json_obj(s.profile)},
      {"height", s.height},
      {"width", s.width},
      {"z_levels", s.z_levels},
      {"walls", s.walls},
      {"objects", std::move(objs)},
      {"agent_start", cell_to_json(s.agent_start)},
      {"agent_dir", static_cast<int>(s.agent_dir)},
  };
  return j.dump(2);
}

Scene scene_from_json(const std::string& text) {
  const json j = json::parse(text);
  require_version(j, 1);
  Scene s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.profile = profile_from_json_obj(j.at("profile"));
  s.height = j.at("height").get<int>();
  s.width = j.at("width").get<int>();
  s.z_levels = j.at("z_levels").get<int>();
  s.walls = j.at("walls").get<std::vector<std::uint8_t>>();
  for (const auto& o : j.at("objects")) s.objects.push_back(object_from_json(o));
  s.agent_start = cell_from_json(j.at("agent_start"));
  s.agent_dir = static_cast<Direction>(j.at("agent_dir").get<int>());
  if (static_cast<int>(s.walls.size()) != s.height * s.width) {
    throw std::runtime_error("walls length does not match grid size");
  }
  return s;
}

std::string task_to_json(const TaskSpec& t) {
  json goals = json::array();
  for (const auto& g : t.goal_conditions) goals.push_back(predicate_to_json(g));
  json j = {
      {"schema_version", t.schema_version},
      {"type", to_string(t.type)},
      {"target_category", t.target_category},
      {"receptacle_category", t.receptacle_category},
      {"instruction_text", t.instruction_text},
      {"step_by_step", t.step_by_step},
      {"goal_conditions", std::move(goals)},
  };
  return j.dump(2);
}

TaskSpec task_from_json(const std::string& text) {
  const json j = json::parse(text);
  require_version(j, 1);
  TaskSpec t;
  const auto type = task_type_from_string(j.at("type").get<std::string>());
  if (!type) throw std::runtime_error("unknown task type");
  t.type = *type;
  t.target_category = j.at("target_category").get<std::string>();
  t.receptacle_category = j.value("receptacle_category", std::string{});
  t.instruction_text = j.at("instruction_text").get<std::string>();
  t.step_by_step = j.value("step_by_step", std::vector<std::string>{});
  for (const auto& g : j.at("goal_conditions")) t.goal_conditions.push_back(predicate_from_json(g));
  return t;
}

std::string profile_to_json(const SceneProfile& p) { return profile_to_json_obj(p).dump(2); }

SceneProfile profile_from_json(const std::string& text) {
  return profile_from_json_obj(json::parse(text));
}

}  // namespace triplan
