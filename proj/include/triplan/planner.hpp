#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "triplan/task.hpp"

namespace triplan {

enum class SubGoalKind : std::uint8_t {
  GoTo,
  PickUp,
  Put,
  Open,
  Close,
  ToggleOn,
  ToggleOff,
  Slice,
  Clean,
  Heat,
  Cool,
};

const char* to_string(SubGoalKind k);
std::optional<SubGoalKind> subgoal_kind_from_string(const std::string& s);

enum class SubGoalStatus : std::uint8_t { Pending, Active, Done, Abandoned };

// One plan step over category names must stay executable from observation
// alone; instances are resolved by the controller at execution time.
struct SubGoal {
  SubGoalKind kind = SubGoalKind::GoTo;
  std::string object;      // category the step acts on
  std::string receptacle;  // Put only: where `object` goes
  SubGoalStatus status = SubGoalStatus::Pending;

  // Category whose availability gates this step (Put is gated on the
  // receptacle; everything else on the object).
  const std::string& key_category() const {
    return kind == SubGoalKind::Put ? receptacle : object;
  }
};

std::string to_string(const SubGoal& g);

struct SubGoalList {
  std::vector<SubGoal> goals;

  // First goal not yet resolved; -1 when the plan is exhausted.
  int active_index() const;
  SubGoal* active();
  const SubGoal* active() const;
  bool finished() const { return active_index() == -1; }
  void complete_active();
  void abandon_active();
};

// Template plans per task type. Deliberately written for the fully observable
// happy path: no Open/Close steps, no search. Revision supplies those.
SubGoalList plan_subgoals(const TaskSpec& task);

struct PlanEdit {
  enum class Op : std::uint8_t { Insert, Replace, Delete };
  Op op = Op::Insert;
  int index = 0;
  SubGoal subgoal;  // ignored for Delete
};

struct IllegalEdit : std::runtime_error {
  explicit IllegalEdit(const std::string& what) : std::runtime_error(what) {}
};

// Applies edits sequentially. An edit may not touch an index before the
// active one (history is immutable) or outside the list. Delete marks the
// goal Abandoned instead of erasing it, so plan length stays auditable. Any
// illegal edit rejects the whole revision and leaves the plan unchanged.
void apply_revision(SubGoalList& plan, const std::vector<PlanEdit>& edits);

struct AuditResponse {
  bool revised = false;
  std::vector<PlanEdit> edits;
  std::string rationale;
};

struct AuditContext {
  const TaskSpec* task = nullptr;
  const SubGoalList* plan = nullptr;
  // Category name -> instance count currently registered in the map.
  std::map<std::string, int> observed;
  int step_index = 0;
  std::string trigger;  // "pre_execution" | "nav_budget" | "interaction_budget"
};

class Auditor {
 public:
  virtual ~Auditor() = default;
  virtual AuditResponse audit(const AuditContext& ctx) = 0;
};

struct AuditorConfig {
  bool close_after_open = false;  // also insert Close once the step after an
                                  // inserted Open completes
};

// Deterministic revision rules. Pre-execution: insert Open before a Put into
// a closed-by-default openable receptacle, and before fetching an undetected
// item whose likeliest host is openable and already mapped. Budget-triggered:
// substitute an unavailable category with the best observed stand-in.
class RuleAuditor : public Auditor {
 public:
  explicit RuleAuditor(AuditorConfig config = {}) : config_(config) {}
  AuditResponse audit(const AuditContext& ctx) override;

 private:
  AuditorConfig config_;
};

// Audits fire when a budget divides the failure counter (so they re-fire at
// every multiple, not only the first).
bool should_trigger_audit(int steps_without_progress, int failed_interactions,
                          int nav_budget, int interaction_budget);

}  // namespace triplan
