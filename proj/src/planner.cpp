#include "triplan/planner.hpp"

#include <algorithm>

#include "triplan/catalog.hpp"
#include "triplan/tables.hpp"

namespace triplan {

const char* to_string(SubGoalKind k) {
  switch (k) {
    case SubGoalKind::GoTo: return "GoTo";
    case SubGoalKind::PickUp: return "PickUp";
    case SubGoalKind::Put: return "Put";
    case SubGoalKind::Open: return "Open";
    case SubGoalKind::Close: return "Close";
    case SubGoalKind::ToggleOn: return "ToggleOn";
    case SubGoalKind::ToggleOff: return "ToggleOff";
    case SubGoalKind::Slice: return "Slice";
    case SubGoalKind::Clean: return "Clean";
    case SubGoalKind::Heat: return "Heat";
    case SubGoalKind::Cool: return "Cool";
  }
  return "?";
}

std::optional<SubGoalKind> subgoal_kind_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(SubGoalKind::Cool); ++i) {
    SubGoalKind k = static_cast<SubGoalKind>(i);
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string to_string(const SubGoal& g) {
  std::string s = to_string(g.kind);
  s += "(";
  s += g.object;
  if (g.kind == SubGoalKind::Put) {
    s += ", ";
    s += g.receptacle;
  }
  s += ")";
  return s;
}

int SubGoalList::active_index() const {
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (goals[i].status == SubGoalStatus::Pending || goals[i].status == SubGoalStatus::Active) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

SubGoal* SubGoalList::active() {
  int i = active_index();
  return i == -1 ? nullptr : &goals[static_cast<std::size_t>(i)];
}

const SubGoal* SubGoalList::active() const {
  int i = active_index();
  return i == -1 ? nullptr : &goals[static_cast<std::size_t>(i)];
}

void SubGoalList::complete_active() {
  if (SubGoal* g = active()) g->status = SubGoalStatus::Done;
}

void SubGoalList::abandon_active() {
  if (SubGoal* g = active()) g->status = SubGoalStatus::Abandoned;
}

SubGoalList plan_subgoals(const TaskSpec& task) {
  const std::string& x = task.target_category;
  const std::string& y = task.receptacle_category;
  auto goto_ = [&](const std::string& c) { return SubGoal{SubGoalKind::GoTo, c, ""}; };
  auto pick = [&](const std::string& c) { return SubGoal{SubGoalKind::PickUp, c, ""}; };
  auto put = [&]() { return SubGoal{SubGoalKind::Put, x, y}; };

  SubGoalList plan;
  switch (task.type) {
    case TaskType::PickAndPlace:
    case TaskType::PlaceInReceptacle:
      plan.goals = {goto_(x), pick(x), goto_(y), put()};
      break;
    case TaskType::PickTwoAndPlace:
      plan.goals = {goto_(x), pick(x), goto_(y), put(), goto_(x), pick(x), goto_(y), put()};
      break;
    case TaskType::CleanAndPlace:
      plan.goals = {goto_(x), pick(x), goto_("Sink"), SubGoal{SubGoalKind::Clean, x, ""},
                    goto_(y), put()};
      break;
    case TaskType::HeatAndPlace:
      plan.goals = {goto_(x), pick(x), goto_("Microwave"), SubGoal{SubGoalKind::Heat, x, ""},
                    goto_(y), put()};
      break;
    case TaskType::CoolAndPlace:
      plan.goals = {goto_(x), pick(x), goto_("Fridge"), SubGoal{SubGoalKind::Cool, x, ""},
                    goto_(y), put()};
      break;
    case TaskType::ExamineInLight:
      plan.goals = {goto_(x), pick(x), goto_(y), SubGoal{SubGoalKind::ToggleOn, y, ""}};
      break;
  }
  return plan;
}

void apply_revision(SubGoalList& plan, const std::vector<PlanEdit>& edits) {
  SubGoalList work = plan;
  for (const PlanEdit& e : edits) {
    int size = static_cast<int>(work.goals.size());
    int active = work.active_index();
    int floor = active == -1 ? size : active;
    if (e.index < floor) throw IllegalEdit("edit touches a resolved step");
    switch (e.op) {
      case PlanEdit::Op::Insert: {
        if (e.index > size) throw IllegalEdit("insert past end of plan");
        SubGoal g = e.subgoal;
        g.status = SubGoalStatus::Pending;
        work.goals.insert(work.goals.begin() + e.index, g);
        break;
      }
      case PlanEdit::Op::Replace: {
        if (e.index >= size) throw IllegalEdit("replace past end of plan");
        SubGoal g = e.subgoal;
        g.status = SubGoalStatus::Pending;
        work.goals[static_cast<std::size_t>(e.index)] = g;
        break;
      }
      case PlanEdit::Op::Delete: {
        if (e.index >= size) throw IllegalEdit("delete past end of plan");
        work.goals[static_cast<std::size_t>(e.index)].status = SubGoalStatus::Abandoned;
        break;
      }
    }
  }
  plan = std::move(work);
}

bool should_trigger_audit(int steps_without_progress, int failed_interactions, int nav_budget,
                          int interaction_budget) {
  if (nav_budget > 0 && steps_without_progress > 0 &&
      steps_without_progress % nav_budget == 0) {
    return true;
  }
  if (interaction_budget > 0 && failed_interactions > 0 &&
      failed_interactions % interaction_budget == 0) {
    return true;
  }
  return false;
}

namespace {

bool observed_any(const AuditContext& ctx, const std::string& category) {
  auto it = ctx.observed.find(category);
  return it != ctx.observed.end() && it->second > 0;
}

// Index of the GoTo for `category` closest before `idx` (not before the
// active index); `idx` itself when there is none.
int insertion_point(const SubGoalList& plan, int active, int idx, const std::string& category) {
  for (int i = idx - 1; i >= active; --i) {
    const SubGoal& g = plan.goals[static_cast<std::size_t>(i)];
    if (g.status == SubGoalStatus::Abandoned) continue;
    if (g.kind == SubGoalKind::GoTo && g.object == category) return i;
  }
  return idx;
}

bool open_planned_before(const SubGoalList& plan, int active, int idx,
                         const std::string& category) {
  for (int i = active; i < idx; ++i) {
    const SubGoal& g = plan.goals[static_cast<std::size_t>(i)];
    if (g.status == SubGoalStatus::Abandoned) continue;
    if (g.kind == SubGoalKind::Open && g.object == category) return true;
  }
  return false;
}

}  // namespace

AuditResponse RuleAuditor::audit(const AuditContext& ctx) {
  AuditResponse out;
  if (!ctx.plan || !ctx.task) return out;
  const SubGoalList& plan = *ctx.plan;
  int active = plan.active_index();
  if (active == -1) return out;
  const Catalog& cat = Catalog::standard();

  if (ctx.trigger == "pre_execution") {
    // Collect (insert index, subgoal) pairs, then emit them in descending
    // index order so sequential application cannot shift a later insert.
    std::vector<std::pair<int, SubGoal>> inserts;
    for (int i = active; i < static_cast<int>(plan.goals.size()); ++i) {
      const SubGoal& g = plan.goals[static_cast<std::size_t>(i)];
      if (g.status == SubGoalStatus::Abandoned) continue;
      if (g.kind == SubGoalKind::Put) {
        // A Put into an openable receptacle needs it opened first.
        const std::string& y = g.receptacle;
        if (cat.contains(y) && cat.info(cat.id(y)).openable &&
            !open_planned_before(plan, active, i, y)) {
          int at = insertion_point(plan, active, i, y);
          inserts.push_back({at, SubGoal{SubGoalKind::Open, y, ""}});
          if (config_.close_after_open) {
            inserts.push_back({i + 1, SubGoal{SubGoalKind::Close, y, ""}});
          }
          out.rationale += "open " + y + " before putting into it; ";
        }
      } else if (g.kind == SubGoalKind::PickUp) {
        // Fetching an item nobody has seen: open its likeliest mapped host.
        const std::string& x = g.object;
        if (!observed_any(ctx, x) && CooccurrenceTable::builtin().has(x)) {
          for (const HostEntry& h : CooccurrenceTable::builtin().hosts_for(x)) {
            if (!cat.contains(h.host) || !cat.info(cat.id(h.host)).openable) continue;
            if (!observed_any(ctx, h.host)) continue;
            if (open_planned_before(plan, active, i, h.host)) break;
            int at = insertion_point(plan, active, i, x);
            inserts.push_back({at, SubGoal{SubGoalKind::Open, h.host, ""}});
            if (config_.close_after_open) {
              inserts.push_back({i + 1, SubGoal{SubGoalKind::Close, h.host, ""}});
            }
            out.rationale += x + " unseen, try opening " + h.host + "; ";
            break;
          }
        }
      }
    }
    std::sort(inserts.begin(), inserts.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& [at, g] : inserts) {
      out.edits.push_back(PlanEdit{PlanEdit::Op::Insert, at, g});
    }
  } else {
    // Budget-triggered: the active step is stuck. Swap its key category for
    // the closest observed stand-in, everywhere it still appears.
    const SubGoal& g = plan.goals[static_cast<std::size_t>(active)];
    const std::string& key = g.key_category();
    if (!observed_any(ctx, key)) {
      std::vector<std::string> candidates;
      for (const auto& [name, count] : ctx.observed) {
        if (count > 0 && name != key) candidates.push_back(name);
      }
      std::string sub = best_substitute(key, candidates, SynonymTable::builtin());
      if (!sub.empty()) {
        for (int i = active; i < static_cast<int>(plan.goals.size()); ++i) {
          const SubGoal& gi = plan.goals[static_cast<std::size_t>(i)];
          if (gi.status == SubGoalStatus::Abandoned) continue;
          if (gi.object != key && gi.receptacle != key) continue;
          SubGoal repl = gi;
          if (repl.object == key) repl.object = sub;
          if (repl.receptacle == key) repl.receptacle = sub;
          out.edits.push_back(PlanEdit{PlanEdit::Op::Replace, i, repl});
        }
        out.rationale = key + " unavailable, using " + sub;
      }
    }
  }

  out.revised = !out.edits.empty();
  return out;
}

}  // namespace triplan
