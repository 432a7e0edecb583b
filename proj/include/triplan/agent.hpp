#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "triplan/corrector.hpp"
#include "triplan/instance_map.hpp"
#include "triplan/planner.hpp"
#include "triplan/scene.hpp"
#include "triplan/search.hpp"
#include "triplan/task.hpp"
#include "triplan/world.hpp"

namespace triplan {

// Which replanning layers run. The three correspond to the ablation arms.
struct ModuleToggles {
  bool high_level = true;  // plan audits (pre-execution + budget-triggered)
  bool mid_level = true;   // commonsense instance search; pooling stub when off
  bool low_level = true;   // per-action feasibility corrector
};

struct EpisodeConfig {
  std::uint64_t scene_seed = 1;
  std::uint64_t task_seed = 1;
  SceneProfile profile;
  TaskOptions task;
  SimConfig sim;
  double theta = 0.3;  // map matching threshold
  ModuleToggles modules;
  int max_steps = 300;
  int nav_budget = 40;          // steps without progress between audits
  int interaction_budget = 10;  // failed interactions between audits
  int failure_cutoff = 10;      // consecutive failed actions end the episode
  bool close_after_open = false;

  // "rule" or "llm" per replanning level; "llm" only takes effect when the
  // driver has an endpoint or transcript configured, else rules run anyway.
  std::string audit_backend = "rule";
  std::string host_backend = "rule";
};

std::string episode_config_to_json(const EpisodeConfig& config);
EpisodeConfig episode_config_from_json(const std::string& text);

// Fixed arm order used by reports: full, no_high, no_mid, no_low, none.
const std::vector<std::string>& ablation_arms();
EpisodeConfig ablate(EpisodeConfig base, const std::string& arm);

struct StepEvent {
  int step = 0;
  std::string mode;  // "survey" | "plan" | "search"
  std::string goal;  // rendering of the active sub-goal, "" during survey
  Action planned;
  Action executed;
  bool corrected = false;
  ActionOutcome outcome;
  AgentState pose;  // after the action

  std::string to_json_line() const;
};

struct EpisodeResult {
  bool success = false;
  double goal_fraction = 0.0;
  int steps = 0;  // simulator actions issued, survey included
  std::uint64_t trajectory_hash = 0;
  std::string end_reason;  // "goal" | "plan_exhausted" | "failure_cutoff" | "step_limit"
  int audits = 0;
  int revisions = 0;
  int corrections = 0;
  int search_actions = 0;
  int failed_actions = 0;
  TaskType task_type = TaskType::PickAndPlace;
  std::string instruction;
};

// Called once per simulator action with the frame/map/pose the decision used,
// the planned (pre-correction) action and what the simulator said.
using StepHook = std::function<void(const Observation& frame, const InstanceMap& map,
                                    const AgentState& pose, const Action& planned,
                                    const ActionOutcome& outcome, int step)>;

// Executes one episode: survey turn, template plan, sub-goal execution with
// implicit navigation, search when a needed category has no eligible mapped
// instance, per-action correction, and budgeted plan audits. Deterministic
// for a fixed config and collaborators.
class EpisodeRunner {
 public:
  explicit EpisodeRunner(EpisodeConfig config);

  // Collaborators are borrowed and must outlive run(). Defaults: the rule
  // auditor, the cooccurrence table, the rule corrector.
  void set_auditor(Auditor* auditor) { auditor_ = auditor; }
  void set_host_predictor(HostPredictor predictor) { host_predictor_ = std::move(predictor); }
  void set_corrector(const CorrectorModel* model) { model_ = model; }
  void set_step_hook(StepHook hook) { hook_ = std::move(hook); }
  void set_event_stream(std::ostream* out) { events_ = out; }

  // Single-shot; the runner is consumed.
  EpisodeResult run();

  const Scene& scene() const { return scene_; }
  const TaskSpec& task() const { return task_; }
  const World& world() const { return world_; }
  const InstanceMap& map() const { return map_; }
  const SubGoalList& plan() const { return plan_; }

 private:
  struct Decision {
    Action action;
    std::string mode;
  };

  void sense();
  // Corrects (when enabled), steps the simulator, logs, re-senses. Returns
  // whether the corrector replaced the planned action.
  bool act(const Action& planned, const std::string& mode);
  bool run_audit(const std::string& trigger);
  std::map<std::string, int> observed_counts() const;

  // The category execution must reach for a sub-goal: the appliance for
  // Clean/Heat/Cool, the receptacle for Put, the object otherwise.
  static std::string destination_category(const SubGoal& g);

  // Nearest mapped instance usable for the sub-goal. Skips instances already
  // consumed by a pickup and, for fetch steps, instances sitting inside the
  // mapped goal receptacle (already delivered).
  std::optional<int> eligible_instance(const SubGoal& g) const;
  std::vector<Cell> instance_cells(int id) const;
  bool within_reach(int id) const;
  bool subgoal_satisfied(const SubGoal& g) const;
  std::optional<Action> plan_mode_action(const SubGoal& g, int target);
  std::optional<Action> navigate_toward(int target);
  // Pitch that centers the view on the target's mapped slice.
  int mapped_pitch(int target) const;
  // Hunts for a cell in interaction range that actually sees the target:
  // rotate in place first, then walk to untried spots with a clear map ray.
  // Empty when every candidate has been tried, meaning the map entry cannot
  // be confirmed from anywhere.
  std::optional<Action> seek_view(int target);
  void on_action_result(const SubGoal* g, const Action& planned, const std::string& mode,
                        bool corrected);
  void reset_subgoal_state();

  EpisodeConfig config_;
  Scene scene_;
  TaskSpec task_;
  World world_;
  InstanceMap map_;
  SubGoalList plan_;
  Observation frame_;

  RuleAuditor rule_auditor_;
  Auditor* auditor_ = nullptr;
  HostPredictor host_predictor_;
  const CorrectorModel* model_ = nullptr;
  StepHook hook_;
  std::ostream* events_ = nullptr;

  std::unique_ptr<SearchPolicy> search_;
  std::set<int> consumed_;    // map ids picked up earlier; never re-targeted
  std::set<int> distrusted_;  // map ids that could not be confirmed in place
  std::map<int, int> target_failures_;  // ghost evidence per map id
  std::set<Cell> tried_view_cells_;
  Cell seek_anchor_{-1, -1};  // where the current rotation scan started
  int pending_target_ = -1;
  int seek_rotations_ = 0;
  int correction_streak_ = 0;
  bool search_audited_ = false;  // one category-swap consult per search
  int steps_without_progress_ = 0;
  int failed_interactions_ = 0;
  int consecutive_failures_ = 0;
  ActionOutcome last_outcome_;

  EpisodeResult result_;
  bool ran_ = false;
};

// Rolls episodes with the corrector off and noisy sensing, recording a
// feasibility record per correctable planned action (successful MoveAhead is
// subsampled 1-in-5 to keep labels balanced). Labels: keep what succeeded,
// otherwise whatever the rule policy prescribes for the failure.
std::vector<CorrectionRecord> generate_dataset(const EpisodeConfig& base,
                                               const std::vector<std::uint64_t>& seeds);

}  // namespace triplan
