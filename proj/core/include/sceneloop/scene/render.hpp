#pragma once

#include "sceneloop/scene/image.hpp"
#include "sceneloop/scene/types.hpp"

namespace sceneloop::scene {

struct RenderConfig {
    int width = 256;
    int height = 256;
    // Row bands rasterised concurrently; the output does not depend on it.
    int threads = 1;
    double near_plane = 1e-3;
};

// Z-buffered flat-shaded rasterisation through a pinhole camera. The state is
// posed at its current_frame first; invisible objects are skipped.
// Shading per face: base_color * (ambient + sum of Lambert terms) + emissive,
// with sun irradiance `energy * max(0, n.l)` and point irradiance
// `energy * max(0, n.l) / d^2`; faces are lit from the side facing the camera.
Image render(const SceneState& state, const CameraPose& camera, const RenderConfig& config = {});

// Pixel coordinates of a world point, or nullopt when behind the camera.
std::optional<Eigen::Vector2d> project(const CameraPose& camera, const Vec3& point, int width, int height);

} // namespace sceneloop::scene
