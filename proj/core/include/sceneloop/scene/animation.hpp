#pragma once

#include "sceneloop/scene/types.hpp"

namespace sceneloop::scene {

// Value of one channel at `frame` by linear interpolation between the
// neighbouring samples; holds the first/last value outside the sampled range.
// Returns false when the object has no samples for that channel.
bool sample_channel(const SceneObject& obj, Channel channel, int frame, Vec3& out);

// A posed copy: every keyframed channel replaced by its value at `frame`.
SceneState evaluate_at_frame(const SceneState& state, int frame);

// Inclusive keyframe range over all objects, if any samples exist.
std::optional<std::pair<int, int>> keyframe_range(const SceneState& state);

} // namespace sceneloop::scene
