#pragma once

#include "sceneloop/scene/types.hpp"

#include <span>
#include <string>

namespace sceneloop::scene {

class NotFound : public Error {
public:
    explicit NotFound(std::string name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// World-space vertex positions of an object's geometry (scale, rotate, translate).
std::vector<Vec3> world_vertices(const SceneObject& obj);

struct ObjectBounds {
    std::string name;
    Aabb box;
    // Largest distance from the box centre to any world vertex.
    double radius = 0.0;
};

ObjectBounds object_bounds(const SceneObject& obj);

// Joint box of the named objects posed at `frame`. An empty list means every
// object; an empty scene yields a degenerate box at the origin.
Aabb aabb_of(const SceneState& state, std::span<const std::string> names, int frame);

// Per-object bounds at `frame`, same name semantics as aabb_of.
std::vector<ObjectBounds> bounds_of(const SceneState& state, std::span<const std::string> names, int frame);

} // namespace sceneloop::scene
