#include "triplan/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <thread>

#include "triplan/json_io.hpp"
#include "triplan/rng.hpp"

namespace triplan {

using nlohmann::json;

EpisodeMetrics compute_metrics(const EpisodeResult& result, int expert_len) {
  EpisodeMetrics m;
  m.success = result.success;
  m.gc_fraction = result.goal_fraction;
  m.path_len = result.steps;
  m.expert_len = expert_len;
  const double p = expert_len <= 0
                       ? 1.0
                       : static_cast<double>(expert_len) /
                             static_cast<double>(std::max(expert_len, result.steps));
  m.plw_sr = (m.success ? 1.0 : 0.0) * p;
  m.plw_gc = m.gc_fraction * p;
  return m;
}

MetricSummary summarize(const std::vector<EpisodeMetrics>& episodes) {
  MetricSummary s;
  s.episodes = static_cast<int>(episodes.size());
  if (episodes.empty()) return s;
  for (const EpisodeMetrics& m : episodes) {
    s.sr += m.success ? 1.0 : 0.0;
    s.gc += m.gc_fraction;
    s.plw_sr += m.plw_sr;
    s.plw_gc += m.plw_gc;
  }
  const double n = static_cast<double>(episodes.size());
  s.sr = 100.0 * s.sr / n;
  s.gc = 100.0 * s.gc / n;
  s.plw_sr = 100.0 * s.plw_sr / n;
  s.plw_gc = 100.0 * s.plw_gc / n;
  return s;
}

namespace {

// Ground-truth-privileged execution helpers shared by the expert oracle and
// the plan simulator. Navigation is an exact BFS over (cell, heading) states
// (unit cost per MoveAhead or rotation), so walked legs are shortest.
class PrivilegedExecutor {
 public:
  explicit PrivilegedExecutor(World& world) : world_(world) {}

  // True when pose (c, d) can both reach and see one of `target_cells`:
  // within interaction range, inside the view cone and distance, and with an
  // unblocked ray. Matches the simulator's per-cell visibility.
  bool viewing_pose(Cell c, Direction d, const std::vector<Cell>& target_cells) const {
    const SimConfig& cfg = world_.config();
    if (distance_to_footprint(c, target_cells) > cfg.interaction_range) return false;
    const long long vd2 =
        static_cast<long long>(cfg.view_distance) * static_cast<long long>(cfg.view_distance);
    for (Cell tc : target_cells) {
      if (tc == c) continue;  // the eye cell is outside its own cone
      if (!in_view_cone(c, d, tc)) continue;
      if (dist2(c, tc) > vd2) continue;
      bool blocked = false;
      for (Cell m : line_of_sight_cells(c, tc)) {
        if (world_.blocked_for_ray(m)) {
          blocked = true;
          break;
        }
      }
      if (!blocked) return true;
    }
    return false;
  }

  // Walks (shortest in actions) to a viewing pose for the footprint. False
  // when no reachable pose qualifies.
  bool walk_to(const std::vector<Cell>& target_cells) {
    const Scene& sc = world_.scene();
    const int H = sc.height, W = sc.width;
    const AgentState start = world_.agent();
    if (viewing_pose(start.cell, start.dir, target_cells)) return true;

    const int states = H * W * 4;
    std::vector<int> parent(static_cast<std::size_t>(states), -1);
    std::vector<std::int8_t> via(static_cast<std::size_t>(states), -1);  // 0 fwd, 1 left, 2 right
    auto key = [&](Cell c, int d) { return (c.row * W + c.col) * 4 + d; };

    const int start_key = key(start.cell, static_cast<int>(start.dir));
    parent[static_cast<std::size_t>(start_key)] = start_key;
    std::deque<int> queue = {start_key};
    int goal_key = -1;
    while (!queue.empty() && goal_key < 0) {
      const int cur = queue.front();
      queue.pop_front();
      const Cell c{cur / 4 / W, cur / 4 % W};
      const int d = cur % 4;
      struct Edge {
        Cell cell;
        int dir;
        std::int8_t via;
      };
      const Cell fwd = step_from(c, static_cast<Direction>(d));
      const Edge edges[3] = {
          {fwd, d, 0},
          {c, (d + 3) % 4, 1},
          {c, (d + 1) % 4, 2},
      };
      for (const Edge& e : edges) {
        if (e.via == 0 && !world_.traversable(e.cell)) continue;
        const int k = key(e.cell, e.dir);
        if (parent[static_cast<std::size_t>(k)] != -1) continue;
        parent[static_cast<std::size_t>(k)] = cur;
        via[static_cast<std::size_t>(k)] = e.via;
        if (viewing_pose(e.cell, static_cast<Direction>(e.dir), target_cells)) {
          goal_key = k;
          break;
        }
        queue.push_back(k);
      }
    }
    if (goal_key < 0) return false;

    std::vector<ActionKind> actions;
    for (int k = goal_key; k != start_key; k = parent[static_cast<std::size_t>(k)]) {
      switch (via[static_cast<std::size_t>(k)]) {
        case 0:
          actions.push_back(ActionKind::MoveAhead);
          break;
        case 1:
          actions.push_back(ActionKind::RotateLeft);
          break;
        default:
          actions.push_back(ActionKind::RotateRight);
          break;
      }
    }
    std::reverse(actions.begin(), actions.end());
    for (ActionKind k : actions) {
      if (!world_.step(Action{k}).success) return false;
    }
    return true;
  }

  bool set_pitch_for(int z) {
    const int want = z - world_.z_levels() / 2;
    while (world_.agent().pitch < want) {
      if (!world_.step(Action{ActionKind::LookUp}).success) return false;
    }
    while (world_.agent().pitch > want) {
      if (!world_.step(Action{ActionKind::LookDown}).success) return false;
    }
    return true;
  }

  ActionOutcome interact(ActionKind kind, ObjectId id) {
    Action a;
    a.kind = kind;
    a.target_id = id;
    return world_.step(a);
  }

  World& world() { return world_; }

 private:
  World& world_;
};

// Nearest instance of `category` passing `pred`; ties by id. kNoObject when
// none qualifies.
template <typename Pred>
ObjectId nearest_instance(const World& world, CategoryId category, Pred pred) {
  ObjectId best = kNoObject;
  double best_d = 0.0;
  for (const ObjectInstance& o : world.objects()) {
    if (o.category != category || o.held) continue;
    if (!pred(o)) continue;
    const double d = distance_to_footprint(world.agent().cell, o.footprint);
    if (best == kNoObject || d < best_d || (d == best_d && o.id < best)) {
      best = o.id;
      best_d = d;
    }
  }
  return best;
}

bool has_free_slot(const World& world, const ObjectInstance& host) {
  for (Cell c : host.footprint) {
    bool taken = false;
    for (const ObjectInstance& o : world.objects()) {
      if (o.container == host.id && !o.held && o.cell() == c) taken = true;
    }
    if (!taken) return true;
  }
  return false;
}

struct ExpertFailure {};

// Walk + pitch + open the container when the item hides inside one, then
// pick the item up. Throws ExpertFailure when any stage refuses.
ObjectId expert_fetch(PrivilegedExecutor& ex, CategoryId item_cat,
                      const std::function<bool(const ObjectInstance&)>& pred) {
  World& world = ex.world();
  const Catalog& cat = Catalog::standard();
  const ObjectId id = nearest_instance(world, item_cat, pred);
  if (id == kNoObject) throw ExpertFailure{};
  const ObjectInstance& item = world.object(id);
  if (item.container != kNoObject) {
    const ObjectInstance& host = world.object(item.container);
    if (cat.info(host.category).openable && !host.open) {
      if (!ex.walk_to(host.footprint)) throw ExpertFailure{};
      if (!ex.set_pitch_for(host.z)) throw ExpertFailure{};
      if (!ex.interact(ActionKind::Open, host.id).success) throw ExpertFailure{};
    }
  }
  if (!ex.walk_to(world.object(id).footprint)) throw ExpertFailure{};
  if (!ex.set_pitch_for(world.object(id).z)) throw ExpertFailure{};
  if (!ex.interact(ActionKind::PickUp, id).success) throw ExpertFailure{};
  return id;
}

void expert_deliver(PrivilegedExecutor& ex, CategoryId receptacle_cat) {
  World& world = ex.world();
  const Catalog& cat = Catalog::standard();
  const ObjectId host_id = nearest_instance(
      world, receptacle_cat, [&](const ObjectInstance& o) { return has_free_slot(world, o); });
  if (host_id == kNoObject) throw ExpertFailure{};
  if (!ex.walk_to(world.object(host_id).footprint)) throw ExpertFailure{};
  if (!ex.set_pitch_for(world.object(host_id).z)) throw ExpertFailure{};
  const ObjectInstance& host = world.object(host_id);
  if (cat.info(host.category).openable && !host.open) {
    if (!ex.interact(ActionKind::Open, host_id).success) throw ExpertFailure{};
  }
  if (!ex.interact(ActionKind::Put, host_id).success) throw ExpertFailure{};
}

}  // namespace

int expert_length(const Scene& scene, const TaskSpec& task, const SimConfig& sim) {
  SimConfig quiet = sim;
  quiet.noise = NoiseConfig{};  // the expert never senses; keep streams clean
  World world(scene, quiet, 0);
  PrivilegedExecutor ex(world);
  const Catalog& cat = Catalog::standard();

  try {
    for (const Predicate& p : task.goal_conditions) {
      if (!cat.contains(p.object_category)) throw Incompletable("unknown goal category");
      const CategoryId oc = cat.id(p.object_category);
      switch (p.kind) {
        case PredicateKind::InReceptacle: {
          if (!cat.contains(p.receptacle_category)) throw Incompletable("unknown receptacle");
          const CategoryId rc = cat.id(p.receptacle_category);
          auto inside_goal = [&](const ObjectInstance& o) {
            return o.container != kNoObject && !o.held &&
                   world.object(o.container).category == rc;
          };
          auto satisfied = [&] {
            int n = 0;
            for (const ObjectInstance& o : world.objects()) {
              if (o.category == oc && inside_goal(o)) ++n;
            }
            return n;
          };
          while (satisfied() < p.min_count) {
            const ObjectId held = world.agent().holding;
            if (held == kNoObject || world.object(held).category != oc) {
              if (held != kNoObject) throw Incompletable("expert holds the wrong object");
              expert_fetch(ex, oc, [&](const ObjectInstance& o) { return !inside_goal(o); });
            }
            expert_deliver(ex, rc);
          }
          break;
        }
        case PredicateKind::Cleaned:
        case PredicateKind::Heated:
        case PredicateKind::Cooled: {
          auto flagged = [&](const ObjectInstance& o) {
            return p.kind == PredicateKind::Cleaned   ? o.cleaned
                   : p.kind == PredicateKind::Heated ? o.heated
                                                     : o.cooled;
          };
          auto count = [&] {
            int n = 0;
            for (const ObjectInstance& o : world.objects()) {
              if (o.category == oc && flagged(o)) ++n;
            }
            return n;
          };
          const char* appliance = p.kind == PredicateKind::Cleaned   ? "Sink"
                                  : p.kind == PredicateKind::Heated ? "Microwave"
                                                                    : "Fridge";
          const ActionKind verb = p.kind == PredicateKind::Cleaned   ? ActionKind::Clean
                                  : p.kind == PredicateKind::Heated ? ActionKind::Heat
                                                                    : ActionKind::Cool;
          while (count() < p.min_count) {
            const ObjectId held = world.agent().holding;
            if (held == kNoObject || world.object(held).category != oc ||
                flagged(world.object(held))) {
              if (held != kNoObject) throw Incompletable("expert holds the wrong object");
              expert_fetch(ex, oc, [&](const ObjectInstance& o) { return !flagged(o); });
            }
            const ObjectId app = nearest_instance(world, cat.id(appliance),
                                                  [](const ObjectInstance&) { return true; });
            if (app == kNoObject) throw Incompletable("no appliance in scene");
            if (!ex.walk_to(world.object(app).footprint)) throw Incompletable("appliance unreachable");
            Action a;
            a.kind = verb;
            a.target_category = p.object_category;
            if (!world.step(a).success) throw Incompletable("appliance action refused");
          }
          break;
        }
        case PredicateKind::Holding: {
          const ObjectId held = world.agent().holding;
          if (held != kNoObject && world.object(held).category == oc) break;
          if (held != kNoObject) throw Incompletable("expert holds the wrong object");
          expert_fetch(ex, oc, [](const ObjectInstance&) { return true; });
          break;
        }
        case PredicateKind::ToggledOn: {
          const ObjectId id =
              nearest_instance(world, oc, [](const ObjectInstance&) { return true; });
          if (id == kNoObject) throw Incompletable("no toggle target");
          if (world.object(id).toggled_on) break;
          if (!ex.walk_to(world.object(id).footprint)) throw Incompletable("target unreachable");
          if (!ex.set_pitch_for(world.object(id).z)) throw Incompletable("pitch refused");
          if (!ex.interact(ActionKind::ToggleOn, id).success)
            throw Incompletable("toggle refused");
          break;
        }
      }
    }
  } catch (const ExpertFailure&) {
    throw Incompletable("expert could not complete the task");
  }
  if (!world.goal_satisfied(task)) throw Incompletable("expert finished but goals unmet");
  return world.step_count();
}

PlanSimOutcome simulate_plan(const Scene& scene, const TaskSpec& task, const SubGoalList& plan,
                             const SimConfig& sim) {
  World world(scene, sim, 0);
  PrivilegedExecutor ex(world);
  const Catalog& cat = Catalog::standard();
  PlanSimOutcome out;

  auto fail_step = [&](int index, const std::string& reason) {
    out.failed_step = index;
    out.failure = reason;
  };

  for (std::size_t i = 0; i < plan.goals.size() && out.failed_step < 0; ++i) {
    const SubGoal& g = plan.goals[i];
    if (g.status == SubGoalStatus::Abandoned) continue;
    const int idx = static_cast<int>(i);

    // Clean/Heat/Cool run at the appliance; everything else binds an
    // instance of the named category (nearest, ground truth).
    if (g.kind == SubGoalKind::Clean || g.kind == SubGoalKind::Heat ||
        g.kind == SubGoalKind::Cool) {
      const char* appliance = g.kind == SubGoalKind::Clean   ? "Sink"
                              : g.kind == SubGoalKind::Heat ? "Microwave"
                                                            : "Fridge";
      const ObjectId app =
          nearest_instance(world, cat.id(appliance), [](const ObjectInstance&) { return true; });
      if (app == kNoObject) {
        fail_step(idx, to_string(FailureReason::InvalidTarget));
        break;
      }
      if (!ex.walk_to(world.object(app).footprint)) {
        fail_step(idx, to_string(FailureReason::Blocked));
        break;
      }
      Action a;
      a.kind = g.kind == SubGoalKind::Clean  ? ActionKind::Clean
               : g.kind == SubGoalKind::Heat ? ActionKind::Heat
                                             : ActionKind::Cool;
      a.target_category = g.object;
      const ActionOutcome res = world.step(a);
      if (!res.success) fail_step(idx, to_string(*res.failure));
      continue;
    }

    const std::string& target_name = g.kind == SubGoalKind::Put ? g.receptacle : g.object;
    if (!cat.contains(target_name)) {
      fail_step(idx, to_string(FailureReason::InvalidTarget));
      break;
    }
    const CategoryId tc = cat.id(target_name);
    ObjectId id = kNoObject;
    if (g.kind == SubGoalKind::Put) {
      id = nearest_instance(world, tc,
                            [&](const ObjectInstance& o) { return has_free_slot(world, o); });
    } else {
      id = nearest_instance(world, tc, [](const ObjectInstance&) { return true; });
    }
    if (id == kNoObject) {
      fail_step(idx, to_string(FailureReason::InvalidTarget));
      break;
    }
    if (!ex.walk_to(world.object(id).footprint)) {
      fail_step(idx, to_string(FailureReason::Blocked));
      break;
    }
    if (g.kind == SubGoalKind::GoTo) continue;
    if (!ex.set_pitch_for(world.object(id).z)) {
      fail_step(idx, to_string(FailureReason::Blocked));
      break;
    }
    ActionKind kind;
    switch (g.kind) {
      case SubGoalKind::PickUp:
        kind = ActionKind::PickUp;
        break;
      case SubGoalKind::Put:
        kind = ActionKind::Put;
        break;
      case SubGoalKind::Open:
        kind = ActionKind::Open;
        break;
      case SubGoalKind::Close:
        kind = ActionKind::Close;
        break;
      case SubGoalKind::ToggleOn:
        kind = ActionKind::ToggleOn;
        break;
      case SubGoalKind::ToggleOff:
        kind = ActionKind::ToggleOff;
        break;
      default:
        kind = ActionKind::Slice;
        break;
    }
    const ActionOutcome res = ex.interact(kind, id);
    if (!res.success) fail_step(idx, to_string(*res.failure));
  }

  out.success = world.goal_satisfied(task);
  return out;
}

namespace {

json stratum_to_json(const SuiteStratum& s) {
  json j = {
      {"name", s.name},
      {"count", s.count},
      {"base_seed", s.base_seed},
      {"profile", s.profile},
      {"alias_prob", s.alias_prob},
      {"force_hidden_target", s.force_hidden_target},
      {"force_type_fraction", s.force_type_fraction},
      {"depth_sigma", s.depth_sigma},
      {"mask_dropout", s.mask_dropout},
  };
  if (s.force_type) j["force_type"] = to_string(*s.force_type);
  return j;
}

SuiteStratum stratum_from_json(const json& j) {
  SuiteStratum s;
  s.name = j.at("name").get<std::string>();
  s.count = j.value("count", s.count);
  s.base_seed = j.value("base_seed", s.base_seed);
  s.profile = j.value("profile", s.profile);
  s.alias_prob = j.value("alias_prob", s.alias_prob);
  s.force_hidden_target = j.value("force_hidden_target", s.force_hidden_target);
  s.force_type_fraction = j.value("force_type_fraction", s.force_type_fraction);
  s.depth_sigma = j.value("depth_sigma", s.depth_sigma);
  s.mask_dropout = j.value("mask_dropout", s.mask_dropout);
  if (j.contains("force_type")) {
    const auto t = task_type_from_string(j.at("force_type").get<std::string>());
    if (!t) throw std::runtime_error("unknown force_type in suite");
    s.force_type = *t;
  }
  return s;
}

}  // namespace

SuiteSpec SuiteSpec::builtin_default() {
  SuiteSpec spec;
  spec.name = "default";

  SuiteStratum occ;
  occ.name = "occ";
  occ.count = 100;
  occ.base_seed = 9100;
  occ.profile = "occlusion_heavy";
  occ.alias_prob = 0.35;
  occ.force_hidden_target = true;
  occ.force_type = TaskType::PlaceInReceptacle;
  occ.force_type_fraction = 0.55;
  occ.depth_sigma = 0.25;
  occ.mask_dropout = 0.05;

  SuiteStratum mixed;
  mixed.name = "mixed";
  mixed.count = 100;
  mixed.base_seed = 4200;
  mixed.profile = "half_hidden";
  mixed.alias_prob = 0.15;
  mixed.depth_sigma = 0.25;
  mixed.mask_dropout = 0.05;

  spec.strata = {occ, mixed};
  return spec;
}

std::string SuiteSpec::to_json() const {
  json arr = json::array();
  for (const SuiteStratum& s : strata) arr.push_back(stratum_to_json(s));
  return json{{"schema_version", schema_version}, {"name", name}, {"strata", std::move(arr)}}
      .dump(2);
}

SuiteSpec SuiteSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open suite file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const json j = json::parse(buf.str());
  if (j.at("schema_version").get<int>() != 1) throw std::runtime_error("unsupported suite version");
  SuiteSpec spec;
  spec.name = j.value("name", spec.name);
  for (const auto& s : j.at("strata")) spec.strata.push_back(stratum_from_json(s));
  return spec;
}

std::vector<SuiteEpisode> expand_suite(const SuiteSpec& suite, const EpisodeConfig& base) {
  std::vector<SuiteEpisode> episodes;
  int index = 0;
  for (const SuiteStratum& stratum : suite.strata) {
    const SceneProfile profile = named_profile(stratum.profile);
    for (int i = 0; i < stratum.count; ++i, ++index) {
      EpisodeConfig cfg = base;
      cfg.profile = profile;
      cfg.sim.noise.depth_sigma = stratum.depth_sigma;
      cfg.sim.noise.mask_dropout = stratum.mask_dropout;
      cfg.task = TaskOptions{};
      cfg.task.alias_prob = stratum.alias_prob;
      cfg.task.force_hidden_target = stratum.force_hidden_target;
      if (stratum.force_type) {
        Rng pick(derive_seed(stratum.base_seed, 7000 + static_cast<std::uint64_t>(i)));
        if (pick.chance(stratum.force_type_fraction)) cfg.task.force_type = *stratum.force_type;
      }

      bool feasible = false;
      for (std::uint64_t attempt = 0; attempt < 64 && !feasible; ++attempt) {
        cfg.scene_seed =
            derive_seed(stratum.base_seed, static_cast<std::uint64_t>(i) * 131 + attempt + 1);
        cfg.task_seed = derive_seed(cfg.scene_seed, 0x7a51);
        try {
          const Scene scene = generate_scene(cfg.scene_seed, cfg.profile);
          (void)sample_task(scene, cfg.task_seed, cfg.task);
          feasible = true;
        } catch (const ProfileInfeasible&) {
        } catch (const TaskInfeasible&) {
        }
      }
      if (!feasible) {
        throw std::runtime_error("no feasible seed for stratum " + stratum.name + " episode " +
                                 std::to_string(i));
      }
      episodes.push_back(SuiteEpisode{index, stratum.name, cfg});
    }
  }
  return episodes;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string format_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

VariantReport run_suite(const SuiteSpec& suite, const EpisodeConfig& base, const std::string& arm,
                        const SuiteRunOptions& options) {
  const EpisodeConfig armed = ablate(base, arm);
  const std::vector<SuiteEpisode> episodes = expand_suite(suite, armed);

  VariantReport report;
  report.variant = arm;
  report.rows.resize(episodes.size());
  std::vector<EpisodeMetrics> metrics(episodes.size());

  std::atomic<std::size_t> cursor{0};
  std::atomic<int> done{0};
  auto work = [&] {
    for (std::size_t k = cursor.fetch_add(1); k < episodes.size(); k = cursor.fetch_add(1)) {
      const SuiteEpisode& ep = episodes[k];
      EpisodeRow row;
      row.index = ep.index;
      row.stratum = ep.stratum;
      row.scene_seed = ep.config.scene_seed;
      row.task_seed = ep.config.task_seed;
      try {
        EpisodeRunner runner(ep.config);
        row.task_type = runner.task().type;
        if (options.customize) options.customize(runner);
        std::ofstream log;
        if (!options.log_dir.empty()) {
          char name[64];
          std::snprintf(name, sizeof(name), "/%s_ep%04d.jsonl", arm.c_str(), ep.index);
          log.open(options.log_dir + name);
          runner.set_event_stream(&log);
        }
        const EpisodeResult result = runner.run();
        int expert = 0;
        try {
          expert = expert_length(runner.scene(), runner.task(), ep.config.sim);
        } catch (const Incompletable&) {
          expert = result.steps;  // no oracle baseline; weight drops out
        }
        row.metrics = compute_metrics(result, expert);
        row.end_reason = result.end_reason;
        row.trajectory_hash = result.trajectory_hash;
      } catch (const std::exception&) {
        row.end_reason = "error";
      }
      report.rows[k] = std::move(row);
      metrics[k] = report.rows[k].metrics;
      done.fetch_add(1);
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (options.progress) {
    (*options.progress) << arm << ": " << done.load() << "/" << episodes.size()
                        << " episodes\n";
  }

  report.overall = summarize(metrics);
  std::map<std::string, std::vector<EpisodeMetrics>> by_type, by_stratum;
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    by_type[to_string(report.rows[k].task_type)].push_back(metrics[k]);
    by_stratum[report.rows[k].stratum].push_back(metrics[k]);
  }
  for (const auto& [name, ms] : by_type) report.by_task_type[name] = summarize(ms);
  for (const auto& [name, ms] : by_stratum) report.by_stratum[name] = summarize(ms);
  return report;
}

std::string format_table(const std::vector<VariantReport>& reports) {
  std::ostringstream out;
  auto line = [&](const std::string& label, const MetricSummary& s) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-12s %8d   %6.2f (%6.2f)   %6.2f (%6.2f)\n", label.c_str(),
                  s.episodes, s.gc, s.plw_gc, s.sr, s.plw_sr);
    out << buf;
  };
  out << "variant      episodes   GC (PLWGC)        SR (PLWSR)\n";
  for (const VariantReport& r : reports) line(r.variant, r.overall);
  for (const VariantReport& r : reports) {
    if (r.by_stratum.empty()) continue;
    out << "\n" << r.variant << " by stratum\n";
    for (const auto& [name, s] : r.by_stratum) line(name, s);
  }
  for (const VariantReport& r : reports) {
    if (r.by_task_type.empty()) continue;
    out << "\n" << r.variant << " by task type\n";
    for (const auto& [name, s] : r.by_task_type) line(name, s);
  }
  return out.str();
}

std::string episodes_csv(const VariantReport& report) {
  std::ostringstream out;
  out << "index,stratum,variant,scene_seed,task_seed,task_type,success,gc_fraction,steps,"
         "expert_steps,plw_sr,plw_gc,end_reason,trajectory_hash\n";
  for (const EpisodeRow& r : report.rows) {
    out << r.index << ',' << r.stratum << ',' << report.variant << ',' << r.scene_seed << ','
        << r.task_seed << ',' << to_string(r.task_type) << ',' << (r.metrics.success ? 1 : 0)
        << ',' << format_double(r.metrics.gc_fraction) << ',' << r.metrics.path_len << ','
        << r.metrics.expert_len << ',' << format_double(r.metrics.plw_sr) << ','
        << format_double(r.metrics.plw_gc) << ',' << r.end_reason << ','
        << format_hash(r.trajectory_hash) << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<VariantReport>& reports) {
  std::ostringstream out;
  out << "variant,scope,key,episodes,sr,gc,plw_sr,plw_gc\n";
  auto row = [&](const std::string& variant, const std::string& scope, const std::string& key,
                 const MetricSummary& s) {
    out << variant << ',' << scope << ',' << key << ',' << s.episodes << ','
        << format_double(s.sr) << ',' << format_double(s.gc) << ',' << format_double(s.plw_sr)
        << ',' << format_double(s.plw_gc) << '\n';
  };
  for (const VariantReport& r : reports) {
    row(r.variant, "overall", "all", r.overall);
    for (const auto& [name, s] : r.by_stratum) row(r.variant, "stratum", name, s);
    for (const auto& [name, s] : r.by_task_type) row(r.variant, "task_type", name, s);
  }
  return out.str();
}

}  // namespace triplan
