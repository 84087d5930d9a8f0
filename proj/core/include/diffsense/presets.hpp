#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "diffsense/scene.hpp"

namespace diffsense {

// Built-in scenes mirroring the validation and activity scenarios:
//
//   plate-to-and-fro     10x10 cm plate, 3.125 cm/s, 3.2 s legs, gaps 19/13 ms
//   plate-continuous     same plate approaching continuously
//   static-background    plate geometry with nothing moving
//   unidirectional-walk  approach at 1.19 m/s, then stop
//   hand-wave            sinusoidal motion peaking at 2.09 m/s
//   back-and-forth-walk  1.19 m/s legs with limb micro-motion
//   two-target           1.19 m/s walker far away, 0.30 m/s walker nearby

std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name.
Scene preset_scene(std::string_view name);

}  // namespace diffsense
