#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "triplan/instance_map.hpp"
#include "triplan/nav.hpp"
#include "triplan/tables.hpp"
#include "triplan/world.hpp"

namespace triplan {

// True when the sub-goal's key category has no mapped instance, so execution
// cannot even pick a destination.
bool needs_search(const std::string& key_category, const InstanceMap& map);

// Ranked host categories for an item, most plausible first. Excluded hosts
// are dropped. Empty for categories the table does not cover.
std::vector<std::string> predict_hosts(const std::string& item_category,
                                       const std::vector<std::string>& excluded);

// Map instance ids to visit while hunting `item_category`: every unvisited
// instance of each predicted host category, hosts in table order, instances
// of one host ordered by walking distance (`field`, see nav).
std::vector<int> build_visit_queue(const std::string& item_category, const InstanceMap& map,
                                   const std::vector<int>& field,
                                   const std::vector<std::string>& excluded_hosts);

// Same, from an explicit ranked host list (LLM-predicted or otherwise).
std::vector<int> build_visit_queue_from(const std::vector<std::string>& hosts,
                                        const InstanceMap& map, const std::vector<int>& field);

// (item, excluded hosts) -> ranked host categories. Lets the agent swap the
// cooccurrence table for a live predictor without the search knowing.
using HostPredictor =
    std::function<std::vector<std::string>(const std::string&, const std::vector<std::string>&)>;

// A search policy proposes one action per tick. The caller owns preemption:
// it stops calling as soon as the target shows up in the map. next_action
// returns nothing when the policy has nowhere left to look. The map is
// mutable only for visit bookkeeping (mark_visited).
class SearchPolicy {
 public:
  virtual ~SearchPolicy() = default;
  virtual std::optional<Action> next_action(InstanceMap& map, const AgentState& pose) = 0;
  virtual bool exhausted() const = 0;
  // True once every ranked candidate has been inspected without a find; the
  // caller may escalate early instead of waiting out the broader stages.
  virtual bool ranked_spent() const { return exhausted(); }
  virtual const std::string& target() const = 0;
};

struct SearchConfig {
  int per_instance_cap = 60;  // ticks before an unproductive host is skipped
  bool allow_reprediction = true;
  HostPredictor host_predictor;  // defaults to the cooccurrence table
};

// Commonsense search. Visits plausible hosts in cooccurrence order: approach,
// face the host, match its height, open it when openable, sweep one pitch
// down and one up so every slice of the host is seen, then restore level
// pitch and mark it inspected. When the queue drains it re-predicts once
// (dropping the host category that yielded nothing). For item targets it
// then widens to every unvisited surface or openable piece of furniture
// (small objects sit somewhere, listed or not), and only after that falls
// back to frontier exploration until the map has no frontier left.
class InstanceSearch : public SearchPolicy {
 public:
  InstanceSearch(std::string target_category, SearchConfig config = {});

  std::optional<Action> next_action(InstanceMap& map, const AgentState& pose) override;
  bool exhausted() const override { return exhausted_; }
  bool ranked_spent() const override { return ranked_spent_; }
  const std::string& target() const override { return target_; }

  int current_instance() const { return current_; }  // -1 between hosts

 private:
  enum class Phase : std::uint8_t { Pick, Approach, Orient, Align, OpenHost, Sweep, Restore };

  std::optional<Action> frontier_step(const InstanceMap& map, const AgentState& pose);

  std::string target_;
  SearchConfig config_;
  Phase phase_ = Phase::Pick;
  int current_ = -1;
  int ticks_on_current_ = 0;
  std::vector<ActionKind> sweep_plan_;
  bool opened_ = false;
  std::vector<std::string> excluded_hosts_;
  bool repredicted_ = false;
  bool fallback_ = false;  // ranked hosts spent; visiting all remaining furniture
  bool current_from_ranked_ = false;
  int ranked_visits_ = 0;  // ranked-queue hosts fully inspected
  bool ranked_spent_ = false;
  bool exhausted_ = false;
  int frontier_ticks_ = 0;
};

// Ablation stand-in: pools mapped furniture presence into an 8x8 grid,
// walks to the densest pool (row-major first on ties), sweeps a full turn,
// then moves to the next pool. Never opens anything, so items inside closed
// receptacles stay invisible to it.
class HeatmapSearchStub : public SearchPolicy {
 public:
  explicit HeatmapSearchStub(std::string target_category);

  std::optional<Action> next_action(InstanceMap& map, const AgentState& pose) override;
  bool exhausted() const override { return exhausted_; }
  const std::string& target() const override { return target_; }

  // Row-major 8x8 pool counts of blocking-category cells; exposed for tests.
  static std::vector<int> pool_counts(const InstanceMap& map);

 private:
  std::string target_;
  std::vector<int> visited_pools_;
  int current_pool_ = -1;
  int sweep_left_ = 0;
  int ticks_on_current_ = 0;
  bool exhausted_ = false;
};

}  // namespace triplan
