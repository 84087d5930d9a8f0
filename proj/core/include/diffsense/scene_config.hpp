#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "diffsense/scene.hpp"

namespace diffsense {

// JSON scene description. Every field has a default except the ones that
// define the scene itself (duration, paths). Validation failures throw
// ConfigError carrying the dotted field path.
//
// Complex values are written as [re, im]; a bare number is accepted as a
// real value. A dynamic path may carry a "plate" object instead of an
// explicit amplitude, in which case its amplitude follows the
// physical-optics plate field.

Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& scene);

Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

}  // namespace diffsense
