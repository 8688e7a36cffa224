#pragma once

#include "sceneloop/scene/math.hpp"
#include "sceneloop/util/error.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace sceneloop::scene {

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
};

enum class ShapeKind { cube, sphere, cylinder, cone, plane, mesh };

std::string_view to_string(ShapeKind kind);
// Returns false for names outside the primitive set ("mesh" is not a primitive name).
bool primitive_from_string(std::string_view name, ShapeKind& out);

inline constexpr int kSphereSegments = 24;
inline constexpr int kSphereRings = 12;
inline constexpr int kRoundSegments = 24;

// Canonical unit-sized, origin-centred primitives: cube edge 1, sphere radius
// 0.5, cylinder/cone radius 0.5 height 1 along Z, plane 1x1 in XY.
const Mesh& primitive_mesh(ShapeKind kind);

class ObjParseError : public Error {
public:
    ObjParseError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

// Minimal OBJ reader: `v` and `f` records only, fan triangulation, negative
// indices relative to the current vertex count, `i/j/k` index tuples allowed.
Mesh parse_obj(std::string_view contents);

} // namespace sceneloop::scene
