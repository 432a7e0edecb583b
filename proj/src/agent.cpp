#include "triplan/agent.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

#include "triplan/json_io.hpp"
#include "triplan/nav.hpp"
#include "triplan/rng.hpp"

namespace triplan {

using nlohmann::json;

namespace {

json toggles_to_json(const ModuleToggles& m) {
  return json{{"high_level", m.high_level}, {"mid_level", m.mid_level}, {"low_level", m.low_level}};
}

ModuleToggles toggles_from_json(const json& j) {
  ModuleToggles m;
  m.high_level = j.value("high_level", true);
  m.mid_level = j.value("mid_level", true);
  m.low_level = j.value("low_level", true);
  return m;
}

json action_to_json(const Action& a) {
  json j = {{"kind", to_string(a.kind)}};
  if (a.target_id >= 0) j["target_id"] = a.target_id;
  if (!a.target_category.empty()) j["target"] = a.target_category;
  return j;
}

}  // namespace

std::string episode_config_to_json(const EpisodeConfig& c) {
  json j = {
      {"schema_version", 1},
      {"scene_seed", c.scene_seed},
      {"task_seed", c.task_seed},
      {"profile", json::parse(profile_to_json(c.profile))},
      {"alias_prob", c.task.alias_prob},
      {"force_hidden_target", c.task.force_hidden_target},
      {"interaction_range", c.sim.interaction_range},
      {"view_distance", c.sim.view_distance},
      {"depth_sigma", c.sim.noise.depth_sigma},
      {"mask_dropout", c.sim.noise.mask_dropout},
      {"theta", c.theta},
      {"modules", toggles_to_json(c.modules)},
      {"max_steps", c.max_steps},
      {"nav_budget", c.nav_budget},
      {"interaction_budget", c.interaction_budget},
      {"failure_cutoff", c.failure_cutoff},
      {"close_after_open", c.close_after_open},
      {"audit_backend", c.audit_backend},
      {"host_backend", c.host_backend},
  };
  if (c.task.force_type) j["force_type"] = to_string(*c.task.force_type);
  return j.dump(2);
}

EpisodeConfig episode_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  EpisodeConfig c;
  c.scene_seed = j.value("scene_seed", c.scene_seed);
  c.task_seed = j.value("task_seed", c.task_seed);
  if (j.contains("profile")) c.profile = profile_from_json(j.at("profile").dump());
  if (j.contains("force_type")) {
    const auto t = task_type_from_string(j.at("force_type").get<std::string>());
    if (!t) throw std::runtime_error("unknown task type in config");
    c.task.force_type = *t;
  }
  c.task.alias_prob = j.value("alias_prob", c.task.alias_prob);
  c.task.force_hidden_target = j.value("force_hidden_target", c.task.force_hidden_target);
  c.sim.interaction_range = j.value("interaction_range", c.sim.interaction_range);
  c.sim.view_distance = j.value("view_distance", c.sim.view_distance);
  c.sim.noise.depth_sigma = j.value("depth_sigma", c.sim.noise.depth_sigma);
  c.sim.noise.mask_dropout = j.value("mask_dropout", c.sim.noise.mask_dropout);
  c.theta = j.value("theta", c.theta);
  if (j.contains("modules")) c.modules = toggles_from_json(j.at("modules"));
  c.max_steps = j.value("max_steps", c.max_steps);
  c.nav_budget = j.value("nav_budget", c.nav_budget);
  c.interaction_budget = j.value("interaction_budget", c.interaction_budget);
  c.failure_cutoff = j.value("failure_cutoff", c.failure_cutoff);
  c.close_after_open = j.value("close_after_open", c.close_after_open);
  c.audit_backend = j.value("audit_backend", c.audit_backend);
  c.host_backend = j.value("host_backend", c.host_backend);
  if ((c.audit_backend != "rule" && c.audit_backend != "llm") ||
      (c.host_backend != "rule" && c.host_backend != "llm")) {
    throw std::runtime_error("backend must be \"rule\" or \"llm\"");
  }
  return c;
}

const std::vector<std::string>& ablation_arms() {
  static const std::vector<std::string> kArms = {"full", "no_high", "no_mid", "no_low", "none"};
  return kArms;
}

EpisodeConfig ablate(EpisodeConfig base, const std::string& arm) {
  base.modules = ModuleToggles{};
  if (arm == "full") return base;
  if (arm == "no_high") {
    base.modules.high_level = false;
  } else if (arm == "no_mid") {
    base.modules.mid_level = false;
  } else if (arm == "no_low") {
    base.modules.low_level = false;
  } else if (arm == "none") {
    base.modules = ModuleToggles{false, false, false};
  } else {
    throw std::runtime_error("unknown ablation arm: " + arm);
  }
  return base;
}

std::string StepEvent::to_json_line() const {
  json j = {
      {"step", step},
      {"mode", mode},
      {"goal", goal},
      {"planned", action_to_json(planned)},
      {"executed", action_to_json(executed)},
      {"corrected", corrected},
      {"success", outcome.success},
      {"failure", outcome.failure ? to_string(*outcome.failure) : ""},
      {"cell", {pose.cell.row, pose.cell.col}},
      {"dir", static_cast<int>(pose.dir)},
      {"pitch", pose.pitch},
  };
  return j.dump();
}

EpisodeRunner::EpisodeRunner(EpisodeConfig config)
    : config_(std::move(config)),
      scene_(generate_scene(config_.scene_seed, config_.profile)),
      task_(sample_task(scene_, config_.task_seed, config_.task)),
      world_(scene_, config_.sim, derive_seed(config_.scene_seed, 0x9e11)),
      map_(scene_.height, scene_.width, scene_.z_levels),
      plan_(plan_subgoals(task_)),
      rule_auditor_(AuditorConfig{config_.close_after_open}),
      auditor_(&rule_auditor_) {
  result_.task_type = task_.type;
  result_.instruction = task_.instruction_text;
}

void EpisodeRunner::sense() {
  frame_ = world_.observe();
  map_.update(frame_, config_.theta);
}

bool EpisodeRunner::act(const Action& planned, const std::string& mode) {
  Action executed = planned;
  CorrectionLabel label = CorrectionLabel::KeepPlanned;
  const bool correctable =
      planned.kind == ActionKind::MoveAhead || is_interaction(planned.kind);
  // A long unbroken run of corrections means the corrector is substituting
  // for progress; let the planned action through so its failure is seen by
  // the failure accounting instead of being masked forever.
  const bool bypass = mode == "plan" && correction_streak_ >= 8;
  if (config_.modules.low_level && correctable && mode != "survey" && !bypass) {
    const FeasibilityFeatures f = extract_features(frame_, map_, world_.agent(), planned);
    label = model_ ? model_->predict(f) : rule_corrector(f);
    executed = resolve_correction(planned, label);
  }
  const bool corrected = label != CorrectionLabel::KeepPlanned;
  if (mode == "plan") correction_streak_ = corrected ? correction_streak_ + 1 : 0;

  const AgentState before = world_.agent();
  last_outcome_ = world_.step(executed);
  if (!last_outcome_.success && executed.kind == ActionKind::MoveAhead &&
      last_outcome_.failure == FailureReason::Blocked) {
    // Bump evidence beats whatever noisy rays said about that cell.
    map_.mark_blocked(step_from(before.cell, before.dir));
  }
  if (hook_) hook_(frame_, map_, before, planned, last_outcome_, world_.step_count());

  StepEvent ev;
  ev.step = world_.step_count();
  ev.mode = mode;
  const SubGoal* g = plan_.active();
  ev.goal = (mode == "survey" || g == nullptr) ? "" : to_string(*g);
  ev.planned = planned;
  ev.executed = executed;
  ev.corrected = corrected;
  ev.outcome = last_outcome_;
  ev.pose = world_.agent();
  if (events_) (*events_) << ev.to_json_line() << "\n";
  result_.trajectory_hash = fnv1a64(ev.to_json_line(), result_.trajectory_hash);

  if (corrected) result_.corrections++;
  if (mode == "search") result_.search_actions++;
  if (last_outcome_.success) {
    consecutive_failures_ = 0;
  } else {
    consecutive_failures_++;
    result_.failed_actions++;
  }
  steps_without_progress_++;
  sense();
  return corrected;
}

std::map<std::string, int> EpisodeRunner::observed_counts() const {
  const auto& cat = Catalog::standard();
  std::map<std::string, int> counts;
  for (const auto& [id, inst] : map_.instances()) counts[cat.name(inst.category)]++;
  return counts;
}

bool EpisodeRunner::run_audit(const std::string& trigger) {
  AuditContext ctx;
  ctx.task = &task_;
  ctx.plan = &plan_;
  ctx.observed = observed_counts();
  ctx.step_index = world_.step_count();
  ctx.trigger = trigger;
  result_.audits++;
  const AuditResponse response = auditor_->audit(ctx);
  if (!response.revised || response.edits.empty()) return false;
  try {
    apply_revision(plan_, response.edits);
  } catch (const IllegalEdit&) {
    return false;
  }
  result_.revisions++;
  return true;
}

std::string EpisodeRunner::destination_category(const SubGoal& g) {
  switch (g.kind) {
    case SubGoalKind::Clean:
      return "Sink";
    case SubGoalKind::Heat:
      return "Microwave";
    case SubGoalKind::Cool:
      return "Fridge";
    case SubGoalKind::Put:
      return g.receptacle;
    default:
      return g.object;
  }
}

std::vector<Cell> EpisodeRunner::instance_cells(int id) const {
  std::vector<Cell> out;
  for (const MapCell& mc : map_.instance(id).cells) out.push_back(mc.cell);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool EpisodeRunner::within_reach(int id) const {
  return distance_to_footprint(world_.agent().cell, instance_cells(id)) <=
         config_.sim.interaction_range;
}

std::optional<int> EpisodeRunner::eligible_instance(const SubGoal& g) const {
  const auto& cat = Catalog::standard();
  const std::string dest = destination_category(g);
  if (!cat.contains(dest)) return std::nullopt;

  // Fetch steps must not re-target what was already delivered: instances
  // lying entirely on the mapped goal receptacle are skipped.
  std::set<Cell> delivered;
  const bool fetch = (g.kind == SubGoalKind::GoTo || g.kind == SubGoalKind::PickUp) &&
                     cat.info(cat.id(dest)).pickupable;
  if (fetch) {
    std::string receptacle;
    for (std::size_t i = static_cast<std::size_t>(plan_.active_index()); i < plan_.goals.size();
         ++i) {
      const SubGoal& later = plan_.goals[i];
      if (later.kind == SubGoalKind::Put && later.object == g.object) {
        receptacle = later.receptacle;
        break;
      }
    }
    if (!receptacle.empty() && cat.contains(receptacle)) {
      for (int rid : map_.instances_of(cat.id(receptacle))) {
        for (Cell c : instance_cells(rid)) delivered.insert(c);
      }
    }
  }

  const auto passable = map_.optimistic_grid();
  const DistanceField from_agent =
      build_distance_field(passable, map_.height(), map_.width(), {world_.agent().cell});
  for (int id : map_.query_instances(cat.id(dest), from_agent.values)) {
    if (consumed_.count(id) > 0 || distrusted_.count(id) > 0) continue;
    if (fetch && !delivered.empty()) {
      const auto cells = instance_cells(id);
      const bool inside = std::all_of(cells.begin(), cells.end(),
                                      [&](Cell c) { return delivered.count(c) > 0; });
      if (inside) continue;
    }
    return id;
  }
  return std::nullopt;
}

bool EpisodeRunner::subgoal_satisfied(const SubGoal& g) const {
  switch (g.kind) {
    case SubGoalKind::GoTo: {
      const auto id = eligible_instance(g);
      return id.has_value() && within_reach(*id);
    }
    case SubGoalKind::PickUp:
      // Anything in hand means the fetch already happened (plans always put
      // down before the next pickup).
      return world_.agent().holding != kNoObject;
    default:
      return false;
  }
}

std::optional<Action> EpisodeRunner::navigate_toward(int target) {
  const AgentState& pose = world_.agent();
  // Sensing is canonical at level pitch; restore it before walking.
  if (pose.pitch > 0) return Action{ActionKind::LookDown};
  if (pose.pitch < 0) return Action{ActionKind::LookUp};

  const auto passable = map_.optimistic_grid();
  const auto region = goal_region(passable, map_.height(), map_.width(), instance_cells(target),
                                  config_.sim.interaction_range);
  if (region.empty()) return Action{ActionKind::RotateRight};
  const DistanceField field =
      build_distance_field(passable, map_.height(), map_.width(), region);
  const NavStep nav = next_nav_action(field, passable, pose.cell, pose.dir);
  if (nav.status == NavStep::Status::Step) return Action{nav.action};
  // Arrived is handled by reach checks before we get here; Unreachable means
  // the known map has no route yet, so scan for one.
  return Action{ActionKind::RotateRight};
}

int EpisodeRunner::mapped_pitch(int target) const {
  // Most common slice across the mapped cells, low slice on ties.
  std::map<int, int> counts;
  for (const MapCell& mc : map_.instance(target).cells) counts[mc.z]++;
  int best_z = 0, best_count = -1;
  for (const auto& [z, n] : counts) {
    if (n > best_count) {
      best_z = z;
      best_count = n;
    }
  }
  return best_z - map_.z_levels() / 2;
}

std::optional<Action> EpisodeRunner::seek_view(int target) {
  const AgentState& pose = world_.agent();
  if (seek_anchor_ != pose.cell) {
    seek_anchor_ = pose.cell;
    seek_rotations_ = 0;
  }
  if (seek_rotations_ < 4) {
    seek_rotations_++;
    return Action{ActionKind::RotateRight};
  }
  tried_view_cells_.insert(pose.cell);

  // A full turn here showed nothing; move to another spot in range whose ray
  // to the mapped footprint is clear as far as the map knows. The host
  // furniture often hides its contents from all but one side.
  const auto passable = map_.optimistic_grid();
  const auto foot = instance_cells(target);
  std::vector<Cell> candidates;
  for (Cell c : goal_region(passable, map_.height(), map_.width(), foot,
                            config_.sim.interaction_range)) {
    if (tried_view_cells_.count(c) > 0) continue;
    const bool sees = std::any_of(foot.begin(), foot.end(), [&](Cell t) {
      for (Cell mid : line_of_sight_cells(c, t)) {
        if (map_.occupancy(mid) == OccupancyState::Blocked) return false;
      }
      return true;
    });
    if (sees) candidates.push_back(c);
  }
  if (candidates.empty()) return std::nullopt;
  const DistanceField field =
      build_distance_field(passable, map_.height(), map_.width(), candidates);
  const NavStep nav = next_nav_action(field, passable, pose.cell, pose.dir);
  if (nav.status == NavStep::Status::Step) return Action{nav.action};
  // The current cell is never a candidate, so this means no candidate is
  // reachable through the known map.
  return std::nullopt;
}

std::optional<Action> EpisodeRunner::plan_mode_action(const SubGoal& g, int target) {
  if (g.kind == SubGoalKind::GoTo) return navigate_toward(target);
  if (!within_reach(target)) return navigate_toward(target);

  const bool adjacency_verb = g.kind == SubGoalKind::Clean || g.kind == SubGoalKind::Heat ||
                              g.kind == SubGoalKind::Cool;
  if (!adjacency_verb) {
    // In reach: center the view on the slice the map puts the destination
    // at, both to see it and because interactions bind at the centered
    // slice. Appliance verbs bind by proximity alone and skip all of this.
    const int want = mapped_pitch(target);
    if (world_.agent().pitch < want) return Action{ActionKind::LookUp};
    if (world_.agent().pitch > want) return Action{ActionKind::LookDown};

    // Make sure the destination is actually in the current frame before
    // committing to the interaction; scan turns and better viewpoints are
    // cheaper than failed actions.
    const auto& cat = Catalog::standard();
    const CategoryId dest_id = cat.id(destination_category(g));
    const bool seen = std::any_of(frame_.pixels.begin(), frame_.pixels.end(),
                                  [&](const Pixel& p) { return p.category == dest_id; });
    if (!seen) {
      if (auto a = seek_view(target)) return a;
      // Nowhere in range sees it: a stale or misprojected map entry. Stop
      // trusting it so the search can look for the real thing.
      distrusted_.insert(target);
      reset_subgoal_state();
      return std::nullopt;
    }
  }

  Action a;
  a.target_category = g.object;
  switch (g.kind) {
    case SubGoalKind::PickUp:
      a.kind = ActionKind::PickUp;
      break;
    case SubGoalKind::Put:
      a.kind = ActionKind::Put;
      a.target_category = g.receptacle;
      break;
    case SubGoalKind::Open:
      a.kind = ActionKind::Open;
      break;
    case SubGoalKind::Close:
      a.kind = ActionKind::Close;
      break;
    case SubGoalKind::ToggleOn:
      a.kind = ActionKind::ToggleOn;
      break;
    case SubGoalKind::ToggleOff:
      a.kind = ActionKind::ToggleOff;
      break;
    case SubGoalKind::Slice:
      a.kind = ActionKind::Slice;
      break;
    case SubGoalKind::Clean:
      a.kind = ActionKind::Clean;
      break;
    case SubGoalKind::Heat:
      a.kind = ActionKind::Heat;
      break;
    case SubGoalKind::Cool:
      a.kind = ActionKind::Cool;
      break;
    case SubGoalKind::GoTo:
      return std::nullopt;
  }
  return a;
}

void EpisodeRunner::reset_subgoal_state() {
  seek_rotations_ = 0;
  seek_anchor_ = Cell{-1, -1};
  tried_view_cells_.clear();
  correction_streak_ = 0;
  failed_interactions_ = 0;
  pending_target_ = -1;
  search_.reset();
  search_audited_ = false;
}

void EpisodeRunner::on_action_result(const SubGoal* g, const Action& planned,
                                     const std::string& mode, bool corrected) {
  if (mode != "plan" || g == nullptr || corrected || !is_interaction(planned.kind)) return;
  if (last_outcome_.success) {
    if (g->kind == SubGoalKind::PickUp && pending_target_ >= 0) consumed_.insert(pending_target_);
    plan_.complete_active();
    reset_subgoal_state();
    steps_without_progress_ = 0;
  } else {
    failed_interactions_++;
    // Repeated NotVisible / InvalidTarget against one mapped instance means
    // the entry does not match anything real; other failure kinds (closed
    // receptacle, wrong pitch, too far) are recoverable in place and stay
    // in the audit path.
    const bool ghost_evidence = last_outcome_.failure == FailureReason::NotVisible ||
                                last_outcome_.failure == FailureReason::InvalidTarget;
    if (ghost_evidence && pending_target_ >= 0 && ++target_failures_[pending_target_] >= 3) {
      distrusted_.insert(pending_target_);
      reset_subgoal_state();
    }
  }
}

EpisodeResult EpisodeRunner::run() {
  if (ran_) throw std::logic_error("episode already run");
  ran_ = true;

  sense();
  for (int i = 0; i < 4; ++i) act(Action{ActionKind::RotateRight}, "survey");
  if (config_.modules.high_level) run_audit("pre_execution");

  const int hard_cap = config_.max_steps * 6;  // guards action-free decision loops
  int guard = 0;
  std::string end;
  while (true) {
    if (world_.goal_satisfied(task_)) {
      end = "goal";
      break;
    }
    if (world_.step_count() >= config_.max_steps) {
      end = "step_limit";
      break;
    }
    if (consecutive_failures_ >= config_.failure_cutoff) {
      end = "failure_cutoff";
      break;
    }
    if (plan_.finished()) {
      end = "plan_exhausted";
      break;
    }
    if (++guard > hard_cap) {
      end = "step_limit";
      break;
    }

    SubGoal* g = plan_.active();
    if (subgoal_satisfied(*g)) {
      plan_.complete_active();
      reset_subgoal_state();
      steps_without_progress_ = 0;
      continue;
    }

    const std::string dest = destination_category(*g);
    const std::optional<int> target = eligible_instance(*g);
    bool acted_in_plan_mode = false;

    if (!target) {
      if (!Catalog::standard().contains(dest)) {
        // The instruction names something the detector vocabulary cannot
        // ground; only a plan revision can recover.
        const bool revised = config_.modules.high_level && run_audit("grounding");
        if (!revised) plan_.abandon_active();
        reset_subgoal_state();
        continue;
      }
      if (!search_ || search_->target() != dest) {
        SearchConfig sc;
        sc.host_predictor = host_predictor_;
        if (config_.modules.mid_level) {
          search_ = std::make_unique<InstanceSearch>(dest, sc);
        } else {
          search_ = std::make_unique<HeatmapSearchStub>(dest);
        }
      }
      const auto a = search_->next_action(map_, world_.agent());
      if (!a) {
        // Nowhere left to look; escalate, else give the step up.
        search_.reset();
        const bool revised = config_.modules.high_level && run_audit("search_exhausted");
        if (!revised) plan_.abandon_active();
        reset_subgoal_state();
        continue;
      }
      // Ranked candidates all inspected without a find: give the audit a
      // chance to swap the category (the instruction may name something the
      // scene spells differently) before the slow exploration stages run.
      if (config_.modules.high_level && !search_audited_ && search_->ranked_spent()) {
        search_audited_ = true;
        if (run_audit("search_exhausted")) {
          reset_subgoal_state();
          continue;
        }
      }
      act(*a, "search");
    } else {
      const auto planned = plan_mode_action(*g, *target);
      if (!planned) continue;
      pending_target_ = *target;
      const bool corrected = act(*planned, "plan");
      on_action_result(g, *planned, "plan", corrected);
      acted_in_plan_mode = true;
    }

    // Budget audits fire only while executing the plan; an active search is
    // already the mid-level recovery and escalates itself on exhaustion.
    if (acted_in_plan_mode && config_.modules.high_level &&
        should_trigger_audit(steps_without_progress_, failed_interactions_, config_.nav_budget,
                             config_.interaction_budget)) {
      const std::string trigger =
          (failed_interactions_ > 0 && failed_interactions_ % config_.interaction_budget == 0)
              ? "interaction_budget"
              : "nav_budget";
      if (run_audit(trigger)) {
        steps_without_progress_ = 0;
        failed_interactions_ = 0;
      }
    }
  }

  result_.success = world_.goal_satisfied(task_);
  result_.goal_fraction = world_.goal_fraction(task_);
  result_.steps = world_.step_count();
  result_.end_reason = end;
  return result_;
}

std::vector<CorrectionRecord> generate_dataset(const EpisodeConfig& base,
                                               const std::vector<std::uint64_t>& seeds) {
  std::vector<CorrectionRecord> records;
  for (std::uint64_t seed : seeds) {
    EpisodeConfig cfg = base;
    cfg.scene_seed = seed;
    cfg.task_seed = derive_seed(seed, 0x7a51);
    cfg.modules.high_level = true;
    cfg.modules.mid_level = true;
    cfg.modules.low_level = false;  // records must show uncorrected failures
    cfg.sim.noise.depth_sigma = std::max(cfg.sim.noise.depth_sigma, 0.35);
    cfg.sim.noise.mask_dropout = std::max(cfg.sim.noise.mask_dropout, 0.10);

    std::unique_ptr<EpisodeRunner> runner;
    try {
      runner = std::make_unique<EpisodeRunner>(cfg);
    } catch (const ProfileInfeasible&) {
      continue;
    } catch (const TaskInfeasible&) {
      continue;
    }
    runner->set_step_hook([&records, seed](const Observation& frame, const InstanceMap& map,
                                           const AgentState& pose, const Action& planned,
                                           const ActionOutcome& outcome, int step) {
      const bool correctable =
          planned.kind == ActionKind::MoveAhead || is_interaction(planned.kind);
      if (!correctable) return;
      if (planned.kind == ActionKind::MoveAhead && outcome.success && step % 5 != 0) return;
      CorrectionRecord rec;
      rec.episode_seed = seed;
      rec.step = step;
      rec.features = extract_features(frame, map, pose, planned);
      rec.label =
          outcome.success ? CorrectionLabel::KeepPlanned : rule_corrector(rec.features);
      rec.failure = outcome.failure ? to_string(*outcome.failure) : "";
      records.push_back(std::move(rec));
    });
    runner->run();
  }
  return records;
}

}  // namespace triplan
