#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "triplan/scene.hpp"

namespace triplan {

enum class TaskType : std::uint8_t {
  PickAndPlace,
  PickTwoAndPlace,
  CleanAndPlace,
  HeatAndPlace,
  CoolAndPlace,
  ExamineInLight,
  PlaceInReceptacle,
};

const char* to_string(TaskType t);
std::optional<TaskType> task_type_from_string(const std::string& s);

enum class PredicateKind : std::uint8_t {
  InReceptacle,  // >= min_count items of object_category hosted by receptacle_category
  Cleaned,
  Heated,
  Cooled,
  Holding,
  ToggledOn,
};

const char* to_string(PredicateKind k);

struct Predicate {
  PredicateKind kind = PredicateKind::InReceptacle;
  std::string object_category;
  std::string receptacle_category;
  int min_count = 1;
};

// target_category is what the instruction says, which may be a synonym of the
// category the scene actually holds; goal_conditions always reference placed
// categories so every task stays completable.
struct TaskSpec {
  int schema_version = 1;
  TaskType type = TaskType::PickAndPlace;
  std::string target_category;
  std::string receptacle_category;
  std::string instruction_text;
  std::vector<std::string> step_by_step;
  std::vector<Predicate> goal_conditions;
};

struct TaskOptions {
  std::optional<TaskType> force_type;
  double alias_prob = 0.0;     // chance the instruction uses a synonym name
  bool force_hidden_target = false;  // target drawn from occluded items only
};

struct TaskInfeasible : std::runtime_error {
  explicit TaskInfeasible(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic task sampling against a scene; throws TaskInfeasible when the
// scene cannot support the requested constraints.
TaskSpec sample_task(const Scene& scene, std::uint64_t seed, const TaskOptions& options = {});

}  // namespace triplan
