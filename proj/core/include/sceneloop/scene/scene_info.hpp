#pragma once

#include "sceneloop/scene/types.hpp"

#include <string>

namespace sceneloop::scene {

// Deterministic text summary shared by every engine backend. The first line is
// always "<n> objects, <m> lights, <k> cameras"; object rows report posed
// values at the current frame with 4-decimal formatting.
std::string format_scene_info(const SceneState& state);

} // namespace sceneloop::scene
