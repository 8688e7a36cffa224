#include "sceneloop/scene/bounds.hpp"

#include "sceneloop/scene/animation.hpp"

#include <algorithm>
#include <cmath>

namespace sceneloop::scene {

NotFound::NotFound(std::string name) : Error("no object named '" + name + "'"), name_(std::move(name)) {}

std::vector<Vec3> world_vertices(const SceneObject& obj) {
    const Mesh& mesh = obj.shape.geometry();
    const Mat3 r = rotation_matrix(obj.rotation_euler);
    std::vector<Vec3> out;
    out.reserve(mesh.vertices.size());
    for (const Vec3& v : mesh.vertices) out.push_back(r * v.cwiseProduct(obj.scale) + obj.location);
    return out;
}

ObjectBounds object_bounds(const SceneObject& obj) {
    ObjectBounds b;
    b.name = obj.name;
    const auto verts = world_vertices(obj);
    if (verts.empty()) {
        b.box = {obj.location, obj.location};
        return b;
    }
    b.box = {verts.front(), verts.front()};
    for (const Vec3& v : verts) b.box.expand(v);
    const Vec3 c = b.box.center();
    for (const Vec3& v : verts) b.radius = std::max(b.radius, (v - c).norm());
    return b;
}

std::vector<ObjectBounds> bounds_of(const SceneState& state, std::span<const std::string> names, int frame) {
    const SceneState posed = evaluate_at_frame(state, frame);
    std::vector<ObjectBounds> out;
    if (names.empty()) {
        for (const auto& obj : posed.objects()) out.push_back(object_bounds(obj));
        return out;
    }
    for (const auto& n : names) {
        if (!posed.find_object(n)) throw NotFound(n);
    }
    for (const auto& n : names) out.push_back(object_bounds(*posed.find_object(n)));
    return out;
}

Aabb aabb_of(const SceneState& state, std::span<const std::string> names, int frame) {
    const auto bounds = bounds_of(state, names, frame);
    if (bounds.empty()) return {};
    Aabb box = bounds.front().box;
    for (const auto& b : bounds) box.expand(b.box);
    return box;
}

} // namespace sceneloop::scene
