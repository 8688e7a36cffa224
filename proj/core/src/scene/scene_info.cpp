#include "sceneloop/scene/scene_info.hpp"

#include "sceneloop/scene/animation.hpp"
#include "sceneloop/util/text.hpp"

#include <fmt/format.h>

namespace sceneloop::scene {

namespace {
std::string vec(const Vec3& v) {
    return fmt::format("({}, {}, {})", text::fixed4(v.x()), text::fixed4(v.y()), text::fixed4(v.z()));
}
} // namespace

std::string format_scene_info(const SceneState& state) {
    const SceneState posed = evaluate_at_frame(state, state.current_frame);
    std::string out = fmt::format("{} objects, {} lights, {} cameras", posed.objects().size(), posed.lights().size(),
                                  posed.cameras().size());
    if (posed.active_camera()) out += fmt::format("\nactive camera: {}", *posed.active_camera());
    if (auto range = keyframe_range(posed)) {
        out += fmt::format("\nframe range: {}..{} (current frame {})", range->first, range->second, posed.current_frame);
    }
    if (!posed.objects().empty()) {
        out += "\nobjects (name | shape | location | rotation | scale | visible):";
        for (const auto& o : posed.objects()) {
            std::string shape(to_string(o.shape.kind));
            if (o.shape.kind == ShapeKind::mesh) shape += ":" + o.shape.mesh_path;
            out += fmt::format("\n  {} | {} | {} | {} | {} | {}", o.name, shape, vec(o.location), vec(o.rotation_euler),
                               vec(o.scale), o.visible ? "true" : "false");
        }
    }
    if (!posed.lights().empty()) {
        out += "\nlights (name | kind | location/direction | color | energy):";
        for (const auto& l : posed.lights()) {
            const bool sun = l.kind == LightKind::sun;
            out += fmt::format("\n  {} | {} | {} | {} | {}", l.name.empty() ? "-" : l.name, sun ? "sun" : "point",
                               vec(sun ? l.direction : l.location), vec(l.color), text::fixed4(l.energy));
        }
    }
    if (!posed.cameras().empty()) {
        out += "\ncameras (name | location | rotation | fov_y):";
        for (const auto& [name, pose] : posed.cameras()) {
            out += fmt::format("\n  {} | {} | {} | {}", name, vec(pose.location), vec(pose.rotation_euler),
                               text::fixed4(pose.fov_y));
        }
    }
    return out;
}

} // namespace sceneloop::scene
