// Python surface over the core: scene synthesis, the simulator, task
// sampling, planning and auditing, episode/suite execution, metrics, and the
// corrector's rule policy. Enum-like values cross the boundary as strings.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "triplan/agent.hpp"
#include "triplan/catalog.hpp"
#include "triplan/corrector.hpp"
#include "triplan/eval.hpp"
#include "triplan/geometry.hpp"
#include "triplan/planner.hpp"
#include "triplan/scene.hpp"
#include "triplan/tables.hpp"
#include "triplan/task.hpp"
#include "triplan/world.hpp"

namespace py = pybind11;
using namespace triplan;

namespace {

ActionKind parse_action_kind(const std::string& s) {
  auto k = action_kind_from_string(s);
  if (!k) throw std::invalid_argument("unknown action kind: " + s);
  return *k;
}

TaskType parse_task_type(const std::string& s) {
  auto t = task_type_from_string(s);
  if (!t) throw std::invalid_argument("unknown task type: " + s);
  return *t;
}

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::North: return "North";
    case Direction::East: return "East";
    case Direction::South: return "South";
    case Direction::West: return "West";
  }
  return "North";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Grid-world embodied-agent core: simulator, three-level replanning, benchmark";

  py::class_<Cell>(m, "Cell")
      .def(py::init<int, int>(), py::arg("row"), py::arg("col"))
      .def_readwrite("row", &Cell::row)
      .def_readwrite("col", &Cell::col)
      .def("__eq__", [](const Cell& a, const Cell& b) { return a == b; })
      .def("__hash__", [](const Cell& c) { return py::hash(py::make_tuple(c.row, c.col)); })
      .def("__repr__", [](const Cell& c) {
        return "Cell(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")";
      });

  py::class_<SceneProfile>(m, "SceneProfile")
      .def(py::init<>())
      .def_readwrite("name", &SceneProfile::name)
      .def_readwrite("height", &SceneProfile::height)
      .def_readwrite("width", &SceneProfile::width)
      .def_readwrite("z_levels", &SceneProfile::z_levels)
      .def_readwrite("rooms", &SceneProfile::rooms)
      .def_readwrite("min_furniture", &SceneProfile::min_furniture)
      .def_readwrite("max_furniture", &SceneProfile::max_furniture)
      .def_readwrite("min_items", &SceneProfile::min_items)
      .def_readwrite("max_items", &SceneProfile::max_items)
      .def_readwrite("occlusion_rate", &SceneProfile::occlusion_rate)
      .def_readwrite("host_affinity", &SceneProfile::host_affinity)
      .def_readwrite("furniture_classes", &SceneProfile::furniture_classes)
      .def_readwrite("single_openable_class", &SceneProfile::single_openable_class)
      .def_readwrite("ensure_duplicate_item", &SceneProfile::ensure_duplicate_item);

  m.def("named_profile", &named_profile, py::arg("name"),
        "Built-in profiles: default, half_hidden, occlusion_heavy, single_host, sparse");

  py::class_<ObjectInstance>(m, "ObjectInstance")
      .def_readonly("id", &ObjectInstance::id)
      .def_property_readonly(
          "category",
          [](const ObjectInstance& o) { return Catalog::standard().name(o.category); })
      .def_readonly("footprint", &ObjectInstance::footprint)
      .def_readonly("z", &ObjectInstance::z)
      .def_readonly("container", &ObjectInstance::container)
      .def_readonly("open", &ObjectInstance::open)
      .def_readonly("toggled_on", &ObjectInstance::toggled_on)
      .def_readonly("cleaned", &ObjectInstance::cleaned)
      .def_readonly("heated", &ObjectInstance::heated)
      .def_readonly("cooled", &ObjectInstance::cooled)
      .def_readonly("sliced", &ObjectInstance::sliced)
      .def_readonly("held", &ObjectInstance::held)
      .def("cell", &ObjectInstance::cell)
      .def("__repr__", [](const ObjectInstance& o) {
        return "<ObjectInstance " + std::to_string(o.id) + " " +
               Catalog::standard().name(o.category) + ">";
      });

  py::class_<Scene>(m, "Scene")
      .def_readonly("seed", &Scene::seed)
      .def_readonly("profile", &Scene::profile)
      .def_readonly("height", &Scene::height)
      .def_readonly("width", &Scene::width)
      .def_readonly("z_levels", &Scene::z_levels)
      .def_readonly("objects", &Scene::objects)
      .def_readonly("agent_start", &Scene::agent_start)
      .def("wall_at", &Scene::wall_at, py::arg("cell"));

  m.def(
      "generate_scene",
      [](std::uint64_t seed, const SceneProfile& profile) { return generate_scene(seed, profile); },
      py::arg("seed"), py::arg("profile") = SceneProfile{});

  py::class_<Predicate>(m, "Predicate")
      .def_property_readonly("kind", [](const Predicate& p) { return std::string(to_string(p.kind)); })
      .def_readonly("object_category", &Predicate::object_category)
      .def_readonly("receptacle_category", &Predicate::receptacle_category)
      .def_readonly("min_count", &Predicate::min_count);

  py::class_<TaskOptions>(m, "TaskOptions")
      .def(py::init<>())
      .def_property(
          "force_type",
          [](const TaskOptions& o) {
            return o.force_type ? py::cast(std::string(to_string(*o.force_type)))
                                : py::object(py::none());
          },
          [](TaskOptions& o, py::object v) {
            if (v.is_none()) {
              o.force_type.reset();
            } else {
              o.force_type = parse_task_type(v.cast<std::string>());
            }
          })
      .def_readwrite("alias_prob", &TaskOptions::alias_prob)
      .def_readwrite("force_hidden_target", &TaskOptions::force_hidden_target);

  py::class_<TaskSpec>(m, "TaskSpec")
      .def_property_readonly("type",
                             [](const TaskSpec& t) { return std::string(to_string(t.type)); })
      .def_readonly("target_category", &TaskSpec::target_category)
      .def_readonly("receptacle_category", &TaskSpec::receptacle_category)
      .def_readonly("instruction_text", &TaskSpec::instruction_text)
      .def_readonly("step_by_step", &TaskSpec::step_by_step)
      .def_readonly("goal_conditions", &TaskSpec::goal_conditions);

  m.def("sample_task", &sample_task, py::arg("scene"), py::arg("seed"),
        py::arg("options") = TaskOptions{});

  py::class_<Action>(m, "Action")
      .def(py::init([](const std::string& kind, int target_id, const std::string& target_category) {
             Action a;
             a.kind = parse_action_kind(kind);
             a.target_id = target_id;
             a.target_category = target_category;
             return a;
           }),
           py::arg("kind"), py::arg("target_id") = -1, py::arg("target_category") = "")
      .def_property(
          "kind", [](const Action& a) { return std::string(to_string(a.kind)); },
          [](Action& a, const std::string& s) { a.kind = parse_action_kind(s); })
      .def_readwrite("target_id", &Action::target_id)
      .def_readwrite("target_category", &Action::target_category)
      .def("__repr__", [](const Action& a) {
        std::string s = std::string("Action(") + to_string(a.kind);
        if (a.target_id >= 0) s += ", target_id=" + std::to_string(a.target_id);
        if (!a.target_category.empty()) s += ", target_category='" + a.target_category + "'";
        return s + ")";
      });

  py::class_<ActionOutcome>(m, "ActionOutcome")
      .def_readonly("success", &ActionOutcome::success)
      .def_property_readonly("failure",
                             [](const ActionOutcome& o) {
                               return o.failure ? py::cast(std::string(to_string(*o.failure)))
                                                : py::object(py::none());
                             })
      .def_readonly("state_changed", &ActionOutcome::state_changed)
      .def_readonly("resolved_target", &ActionOutcome::resolved_target)
      .def("__repr__", [](const ActionOutcome& o) {
        return o.success ? std::string("<ActionOutcome ok>")
                         : "<ActionOutcome fail " + std::string(to_string(*o.failure)) + ">";
      });

  py::class_<AgentState>(m, "AgentState")
      .def_readonly("cell", &AgentState::cell)
      .def_property_readonly("dir",
                             [](const AgentState& s) { return direction_name(s.dir); })
      .def_readonly("pitch", &AgentState::pitch)
      .def_readonly("holding", &AgentState::holding);

  py::class_<Observation>(m, "Observation")
      .def_readonly("step_index", &Observation::step_index)
      .def_readonly("pose", &Observation::pose)
      .def_property_readonly("pixel_count",
                             [](const Observation& o) { return o.pixels.size(); })
      .def_property_readonly("detected", [](const Observation& o) {
        std::vector<std::pair<int, std::string>> out;
        for (auto [id, cat] : o.detected) out.emplace_back(id, Catalog::standard().name(cat));
        return out;
      });

  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("depth_sigma", &NoiseConfig::depth_sigma)
      .def_readwrite("mask_dropout", &NoiseConfig::mask_dropout);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("interaction_range", &SimConfig::interaction_range)
      .def_readwrite("view_distance", &SimConfig::view_distance)
      .def_readwrite("noise", &SimConfig::noise);

  py::class_<World>(m, "World")
      .def(py::init<Scene, SimConfig, std::uint64_t>(), py::arg("scene"),
           py::arg("config") = SimConfig{}, py::arg("noise_seed") = 0)
      .def_property_readonly("agent", [](const World& w) { return w.agent(); })
      .def_property_readonly("step_count", &World::step_count)
      .def_property_readonly("objects", [](const World& w) { return w.objects(); })
      .def("observe", &World::observe)
      .def("step", &World::step, py::arg("action"))
      .def("visible_objects", &World::visible_objects)
      .def("goal_fraction", &World::goal_fraction, py::arg("task"))
      .def("goal_satisfied", &World::goal_satisfied, py::arg("task"))
      .def("state_json", &World::state_json)
      .def("state_hash", &World::state_hash);

  py::class_<SubGoal>(m, "SubGoal")
      .def_property_readonly("kind",
                             [](const SubGoal& g) { return std::string(to_string(g.kind)); })
      .def_readonly("object", &SubGoal::object)
      .def_readonly("receptacle", &SubGoal::receptacle)
      .def_property_readonly("status",
                             [](const SubGoal& g) {
                               switch (g.status) {
                                 case SubGoalStatus::Pending: return "Pending";
                                 case SubGoalStatus::Active: return "Active";
                                 case SubGoalStatus::Done: return "Done";
                                 case SubGoalStatus::Abandoned: return "Abandoned";
                               }
                               return "Pending";
                             })
      .def("__repr__", [](const SubGoal& g) { return to_string(g); });

  py::class_<SubGoalList>(m, "SubGoalList")
      .def_readonly("goals", &SubGoalList::goals)
      .def("active_index", &SubGoalList::active_index)
      .def("finished", &SubGoalList::finished);

  m.def("plan_subgoals", &plan_subgoals, py::arg("task"),
        "Happy-path template plan for a task; revision adds Open/search steps");

  m.def(
      "audit_plan",
      [](const TaskSpec& task, SubGoalList plan, const std::map<std::string, int>& observed,
         const std::string& trigger) {
        RuleAuditor auditor;
        AuditContext ctx;
        ctx.task = &task;
        ctx.plan = &plan;
        ctx.observed = observed;
        ctx.trigger = trigger;
        AuditResponse r = auditor.audit(ctx);
        if (r.revised) apply_revision(plan, r.edits);
        return py::make_tuple(r.revised, plan, r.rationale);
      },
      py::arg("task"), py::arg("plan"), py::arg("observed"), py::arg("trigger") = "pre_execution",
      "Runs the rule auditor once; returns (revised, new_plan, rationale)");

  py::class_<PlanSimOutcome>(m, "PlanSimOutcome")
      .def_readonly("success", &PlanSimOutcome::success)
      .def_readonly("failed_step", &PlanSimOutcome::failed_step)
      .def_readonly("failure", &PlanSimOutcome::failure);

  m.def("simulate_plan", &simulate_plan, py::arg("scene"), py::arg("task"), py::arg("plan"),
        py::arg("sim") = SimConfig{},
        "Privileged execution of a sub-goal plan; reports the first failure");

  m.def("expert_length", &expert_length, py::arg("scene"), py::arg("task"),
        py::arg("sim") = SimConfig{});

  py::class_<ModuleToggles>(m, "ModuleToggles")
      .def(py::init<>())
      .def_readwrite("high_level", &ModuleToggles::high_level)
      .def_readwrite("mid_level", &ModuleToggles::mid_level)
      .def_readwrite("low_level", &ModuleToggles::low_level);

  py::class_<EpisodeConfig>(m, "EpisodeConfig")
      .def(py::init<>())
      .def_readwrite("scene_seed", &EpisodeConfig::scene_seed)
      .def_readwrite("task_seed", &EpisodeConfig::task_seed)
      .def_readwrite("profile", &EpisodeConfig::profile)
      .def_readwrite("task", &EpisodeConfig::task)
      .def_readwrite("sim", &EpisodeConfig::sim)
      .def_readwrite("theta", &EpisodeConfig::theta)
      .def_readwrite("modules", &EpisodeConfig::modules)
      .def_readwrite("max_steps", &EpisodeConfig::max_steps)
      .def_readwrite("nav_budget", &EpisodeConfig::nav_budget)
      .def_readwrite("interaction_budget", &EpisodeConfig::interaction_budget)
      .def_readwrite("failure_cutoff", &EpisodeConfig::failure_cutoff)
      .def_readwrite("audit_backend", &EpisodeConfig::audit_backend)
      .def_readwrite("host_backend", &EpisodeConfig::host_backend)
      .def("to_json", &episode_config_to_json)
      .def_static("from_json", &episode_config_from_json, py::arg("text"));

  py::class_<EpisodeResult>(m, "EpisodeResult")
      .def_readonly("success", &EpisodeResult::success)
      .def_readonly("goal_fraction", &EpisodeResult::goal_fraction)
      .def_readonly("steps", &EpisodeResult::steps)
      .def_readonly("trajectory_hash", &EpisodeResult::trajectory_hash)
      .def_readonly("end_reason", &EpisodeResult::end_reason)
      .def_readonly("audits", &EpisodeResult::audits)
      .def_readonly("revisions", &EpisodeResult::revisions)
      .def_readonly("corrections", &EpisodeResult::corrections)
      .def_readonly("search_actions", &EpisodeResult::search_actions)
      .def_readonly("failed_actions", &EpisodeResult::failed_actions)
      .def_property_readonly("task_type",
                             [](const EpisodeResult& r) {
                               return std::string(to_string(r.task_type));
                             })
      .def_readonly("instruction", &EpisodeResult::instruction);

  m.def(
      "run_episode",
      [](const EpisodeConfig& config) {
        py::gil_scoped_release release;
        EpisodeRunner runner(config);
        return runner.run();
      },
      py::arg("config"));

  m.def("ablation_arms", [] { return ablation_arms(); });
  m.def("ablate", &ablate, py::arg("base"), py::arg("arm"));

  py::class_<EpisodeMetrics>(m, "EpisodeMetrics")
      .def_readonly("success", &EpisodeMetrics::success)
      .def_readonly("gc_fraction", &EpisodeMetrics::gc_fraction)
      .def_readonly("path_len", &EpisodeMetrics::path_len)
      .def_readonly("expert_len", &EpisodeMetrics::expert_len)
      .def_readonly("plw_sr", &EpisodeMetrics::plw_sr)
      .def_readonly("plw_gc", &EpisodeMetrics::plw_gc);

  m.def("compute_metrics", &compute_metrics, py::arg("result"), py::arg("expert_len"));

  py::class_<MetricSummary>(m, "MetricSummary")
      .def_readonly("episodes", &MetricSummary::episodes)
      .def_readonly("sr", &MetricSummary::sr)
      .def_readonly("gc", &MetricSummary::gc)
      .def_readonly("plw_sr", &MetricSummary::plw_sr)
      .def_readonly("plw_gc", &MetricSummary::plw_gc);

  m.def("summarize", &summarize, py::arg("episodes"));

  py::class_<SuiteSpec>(m, "SuiteSpec")
      .def_static("builtin_default", &SuiteSpec::builtin_default)
      .def_static("load", &SuiteSpec::load, py::arg("path"))
      .def_readonly("name", &SuiteSpec::name)
      .def_property_readonly("episode_count",
                             [](const SuiteSpec& s) {
                               int n = 0;
                               for (const auto& st : s.strata) n += st.count;
                               return n;
                             })
      .def("to_json", &SuiteSpec::to_json);

  m.def(
      "expand_suite",
      [](const SuiteSpec& suite, const EpisodeConfig& base) {
        py::gil_scoped_release release;
        return expand_suite(suite, base);
      },
      py::arg("suite"), py::arg("base") = EpisodeConfig{});

  py::class_<SuiteEpisode>(m, "SuiteEpisode")
      .def_readonly("index", &SuiteEpisode::index)
      .def_readonly("stratum", &SuiteEpisode::stratum)
      .def_readonly("config", &SuiteEpisode::config);

  py::class_<EpisodeRow>(m, "EpisodeRow")
      .def_readonly("index", &EpisodeRow::index)
      .def_readonly("stratum", &EpisodeRow::stratum)
      .def_readonly("scene_seed", &EpisodeRow::scene_seed)
      .def_readonly("task_seed", &EpisodeRow::task_seed)
      .def_readonly("metrics", &EpisodeRow::metrics)
      .def_readonly("end_reason", &EpisodeRow::end_reason)
      .def_readonly("trajectory_hash", &EpisodeRow::trajectory_hash);

  py::class_<VariantReport>(m, "VariantReport")
      .def_readonly("variant", &VariantReport::variant)
      .def_readonly("overall", &VariantReport::overall)
      .def_readonly("by_stratum", &VariantReport::by_stratum)
      .def_readonly("rows", &VariantReport::rows);

  m.def(
      "run_suite",
      [](const SuiteSpec& suite, const EpisodeConfig& base, const std::string& arm, int workers) {
        py::gil_scoped_release release;
        SuiteRunOptions opt;
        opt.workers = workers;
        return run_suite(suite, base, arm, opt);
      },
      py::arg("suite"), py::arg("base") = EpisodeConfig{}, py::arg("arm") = "full",
      py::arg("workers") = 1);

  m.def("episodes_csv", &episodes_csv, py::arg("report"));

  py::class_<FeasibilityFeatures>(m, "FeasibilityFeatures")
      .def(py::init<>())
      .def_readwrite("target_visible", &FeasibilityFeatures::target_visible)
      .def_readwrite("target_area", &FeasibilityFeatures::target_area)
      .def_readwrite("target_depth", &FeasibilityFeatures::target_depth)
      .def_readwrite("pitch_offset", &FeasibilityFeatures::pitch_offset)
      .def_readwrite("ahead_free", &FeasibilityFeatures::ahead_free)
      .def_readwrite("holding", &FeasibilityFeatures::holding)
      .def_property(
          "planned",
          [](const FeasibilityFeatures& f) { return std::string(to_string(f.planned)); },
          [](FeasibilityFeatures& f, const std::string& s) { f.planned = parse_action_kind(s); })
      .def("to_vector", &FeasibilityFeatures::to_vector);

  m.def(
      "rule_correction",
      [](const FeasibilityFeatures& f) { return std::string(to_string(rule_corrector(f))); },
      py::arg("features"), "The hand-written recovery policy's label for one decision");

  m.def(
      "category_info",
      [](const std::string& name) {
        const Catalog& cat = Catalog::standard();
        const CategoryInfo& info = cat.info(cat.id(name));
        py::dict d;
        d["name"] = info.name;
        d["pickupable"] = info.pickupable;
        d["openable"] = info.openable;
        d["surface"] = info.surface;
        d["blocking"] = info.blocking;
        d["toggleable"] = info.toggleable;
        d["sliceable"] = info.sliceable;
        d["cleanable"] = info.cleanable;
        d["heatable"] = info.heatable;
        d["coolable"] = info.coolable;
        return d;
      },
      py::arg("name"));

  m.def("synonyms_related", [](const std::string& a, const std::string& b) {
    return SynonymTable::builtin().related(a, b);
  });

  m.def(
      "cooccurrence_hosts",
      [](const std::string& category) {
        std::vector<std::pair<std::string, double>> out;
        if (CooccurrenceTable::builtin().has(category)) {
          for (const HostEntry& e : CooccurrenceTable::builtin().hosts_for(category)) {
            out.emplace_back(e.host, e.weight);
          }
        }
        return out;
      },
      py::arg("category"), "Ranked (host, weight) pairs; empty when the table is silent");

  py::register_exception<ProfileInfeasible>(m, "ProfileInfeasible");
  py::register_exception<TaskInfeasible>(m, "TaskInfeasible");
  py::register_exception<Incompletable>(m, "Incompletable");
  py::register_exception<UnknownCategory>(m, "UnknownCategory");
}
