#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "triplan/agent.hpp"
#include "triplan/planner.hpp"
#include "triplan/scene.hpp"
#include "triplan/task.hpp"

namespace triplan {

struct EpisodeMetrics {
  bool success = false;
  double gc_fraction = 0.0;
  int path_len = 0;    // actions the agent issued
  int expert_len = 0;  // scripted oracle's action count
  double plw_sr = 0.0;
  double plw_gc = 0.0;
};

// Path weighting p = expert / max(expert, path); plw_sr = success * p,
// plw_gc = gc_fraction * p.
EpisodeMetrics compute_metrics(const EpisodeResult& result, int expert_len);

// Aggregate means, reported as percentages in [0, 100].
struct MetricSummary {
  int episodes = 0;
  double sr = 0.0;
  double gc = 0.0;
  double plw_sr = 0.0;
  double plw_gc = 0.0;
};

MetricSummary summarize(const std::vector<EpisodeMetrics>& episodes);

struct Incompletable : std::runtime_error {
  explicit Incompletable(const std::string& what) : std::runtime_error(what) {}
};

// Action count of a ground-truth-privileged scripted policy: it knows every
// object location, walks provably shortest (cell, heading) paths, opens what
// hides its target, and matches pitch before each interaction. Deterministic.
// Throws Incompletable when the scene cannot support the task at all.
int expert_length(const Scene& scene, const TaskSpec& task, const SimConfig& sim = {});

// Executes a sub-goal plan with the same privileged machinery and reports
// the first simulator failure (plan steps marked Abandoned are skipped).
// Success is ground-truth goal satisfaction after the last step.
struct PlanSimOutcome {
  bool success = false;
  int failed_step = -1;    // plan index of the first failed interaction
  std::string failure;     // simulator reason at that step, "" if none
};

PlanSimOutcome simulate_plan(const Scene& scene, const TaskSpec& task, const SubGoalList& plan,
                             const SimConfig& sim = {});

// One benchmark stratum: `count` episodes drawn from a named scene profile
// with fixed task options. Seeds are probed deterministically until scene
// and task generation both succeed.
struct SuiteStratum {
  std::string name;
  int count = 100;
  std::uint64_t base_seed = 1;
  std::string profile = "default";
  double alias_prob = 0.0;
  bool force_hidden_target = false;
  std::optional<TaskType> force_type;
  double force_type_fraction = 1.0;  // share of episodes the forced type applies to
  double depth_sigma = 0.0;
  double mask_dropout = 0.0;
};

struct SuiteSpec {
  int schema_version = 1;
  std::string name = "default";
  std::vector<SuiteStratum> strata;

  static SuiteSpec builtin_default();  // 200 episodes: occlusion-heavy + mixed
  static SuiteSpec load(const std::string& path);
  std::string to_json() const;
};

struct SuiteEpisode {
  int index = 0;
  std::string stratum;
  EpisodeConfig config;
};

// Deterministic expansion to feasible episode configs (module toggles and
// budgets come from `base`; seeds and task options from the strata).
std::vector<SuiteEpisode> expand_suite(const SuiteSpec& suite, const EpisodeConfig& base);

struct EpisodeRow {
  int index = 0;
  std::string stratum;
  std::uint64_t scene_seed = 0;
  std::uint64_t task_seed = 0;
  TaskType task_type = TaskType::PickAndPlace;
  EpisodeMetrics metrics;
  std::string end_reason;
  std::uint64_t trajectory_hash = 0;
};

struct VariantReport {
  std::string variant;
  MetricSummary overall;
  std::map<std::string, MetricSummary> by_task_type;
  std::map<std::string, MetricSummary> by_stratum;
  std::vector<EpisodeRow> rows;  // ordered by episode index
};

struct SuiteRunOptions {
  int workers = 1;
  // Wires collaborators (LLM auditor, trained corrector) into each runner.
  // Must be thread-safe for workers > 1.
  std::function<void(EpisodeRunner&)> customize;
  std::string log_dir;       // when set, per-episode JSONL event logs go here
  std::ostream* progress = nullptr;
};

// Runs every suite episode under one ablation arm. Results are keyed by
// episode index, so the report is identical for any worker count.
VariantReport run_suite(const SuiteSpec& suite, const EpisodeConfig& base, const std::string& arm,
                        const SuiteRunOptions& options = {});

// Table in the benchmark's column layout: GC (PLWGC) and SR (PLWSR) per
// variant, plus per-stratum blocks.
std::string format_table(const std::vector<VariantReport>& reports);

// CSV emitters; stable field order and formatting, byte-identical across
// reruns of the same seeds.
std::string episodes_csv(const VariantReport& report);
std::string summary_csv(const std::vector<VariantReport>& reports);

}  // namespace triplan
