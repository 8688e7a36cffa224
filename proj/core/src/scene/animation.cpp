#include "sceneloop/scene/animation.hpp"

#include <algorithm>

namespace sceneloop::scene {

bool sample_channel(const SceneObject& obj, Channel channel, int frame, Vec3& out) {
    const KeyframeSample* prev = nullptr;
    const KeyframeSample* next = nullptr;
    for (const auto& k : obj.tracks) {
        if (k.channel != channel) continue;
        if (k.frame <= frame) prev = &k;
        if (k.frame >= frame && !next) next = &k;
    }
    if (!prev && !next) return false;
    if (!prev) {
        out = next->value;
    } else if (!next || prev == next || next->frame == prev->frame) {
        out = prev->value;
    } else {
        const double t = static_cast<double>(frame - prev->frame) / static_cast<double>(next->frame - prev->frame);
        out = prev->value + t * (next->value - prev->value);
    }
    return true;
}

SceneState evaluate_at_frame(const SceneState& state, int frame) {
    SceneState posed = state;
    posed.current_frame = frame;
    for (auto& obj : posed.mutable_objects()) {
        if (obj.tracks.empty()) continue;
        Vec3 v;
        if (sample_channel(obj, Channel::location, frame, v)) obj.location = v;
        if (sample_channel(obj, Channel::rotation_euler, frame, v)) obj.rotation_euler = v;
        if (sample_channel(obj, Channel::scale, frame, v)) obj.scale = v;
    }
    return posed;
}

std::optional<std::pair<int, int>> keyframe_range(const SceneState& state) {
    std::optional<std::pair<int, int>> range;
    for (const auto& obj : state.objects()) {
        for (const auto& k : obj.tracks) {
            if (!range) range = std::pair(k.frame, k.frame);
            range->first = std::min(range->first, k.frame);
            range->second = std::max(range->second, k.frame);
        }
    }
    return range;
}

} // namespace sceneloop::scene
