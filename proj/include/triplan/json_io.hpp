#pragma once

#include <string>

#include "triplan/scene.hpp"
#include "triplan/task.hpp"

namespace triplan {

// All serializers carry schema_version and reject unknown versions on load.

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

std::string task_to_json(const TaskSpec& task);
TaskSpec task_from_json(const std::string& text);

std::string profile_to_json(const SceneProfile& profile);
SceneProfile profile_from_json(const std::string& text);

}  // namespace triplan
