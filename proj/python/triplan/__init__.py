"""Grid-world embodied-agent core.

Thin re-export of the compiled module: scene synthesis, the deterministic
simulator, task sampling, the three-level replanning agent, and the
benchmark harness.
"""

from triplan._core import (
    Action,
    ActionOutcome,
    AgentState,
    Cell,
    EpisodeConfig,
    EpisodeMetrics,
    EpisodeResult,
    EpisodeRow,
    FeasibilityFeatures,
    Incompletable,
    MetricSummary,
    ModuleToggles,
    NoiseConfig,
    ObjectInstance,
    Observation,
    PlanSimOutcome,
    Predicate,
    ProfileInfeasible,
    Scene,
    SceneProfile,
    SimConfig,
    SubGoal,
    SubGoalList,
    SuiteEpisode,
    SuiteSpec,
    TaskInfeasible,
    TaskOptions,
    TaskSpec,
    VariantReport,
    World,
    ablate,
    ablation_arms,
    audit_plan,
    compute_metrics,
    cooccurrence_hosts,
    episodes_csv,
    expand_suite,
    expert_length,
    generate_scene,
    named_profile,
    plan_subgoals,
    rule_correction,
    run_episode,
    run_suite,
    sample_task,
    simulate_plan,
    summarize,
    synonyms_related,
)

__all__ = [
    "Action",
    "ActionOutcome",
    "AgentState",
    "Cell",
    "EpisodeConfig",
    "EpisodeMetrics",
    "EpisodeResult",
    "EpisodeRow",
    "FeasibilityFeatures",
    "Incompletable",
    "MetricSummary",
    "ModuleToggles",
    "NoiseConfig",
    "ObjectInstance",
    "Observation",
    "PlanSimOutcome",
    "Predicate",
    "ProfileInfeasible",
    "Scene",
    "SceneProfile",
    "SimConfig",
    "SubGoal",
    "SubGoalList",
    "SuiteEpisode",
    "SuiteSpec",
    "TaskInfeasible",
    "TaskOptions",
    "TaskSpec",
    "VariantReport",
    "World",
    "ablate",
    "ablation_arms",
    "audit_plan",
    "compute_metrics",
    "cooccurrence_hosts",
    "episodes_csv",
    "expand_suite",
    "expert_length",
    "generate_scene",
    "named_profile",
    "plan_subgoals",
    "rule_correction",
    "run_episode",
    "run_suite",
    "sample_task",
    "simulate_plan",
    "summarize",
    "synonyms_related",
]
