#include "sceneloop/scene/mesh.hpp"

#include "sceneloop/util/text.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <sstream>

namespace sceneloop::scene {

std::string_view to_string(ShapeKind kind) {
    switch (kind) {
    case ShapeKind::cube: return "cube";
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::cylinder: return "cylinder";
    case ShapeKind::cone: return "cone";
    case ShapeKind::plane: return "plane";
    case ShapeKind::mesh: return "mesh";
    }
    return "unknown";
}

bool primitive_from_string(std::string_view name, ShapeKind& out) {
    static constexpr std::pair<std::string_view, ShapeKind> kTable[] = {
        {"cube", ShapeKind::cube},         {"sphere", ShapeKind::sphere}, {"cylinder", ShapeKind::cylinder},
        {"cone", ShapeKind::cone},         {"plane", ShapeKind::plane},
    };
    for (auto& [n, k] : kTable) {
        if (n == name) {
            out = k;
            return true;
        }
    }
    return false;
}

namespace {

Mesh make_cube() {
    Mesh m;
    for (int i = 0; i < 8; ++i) {
        m.vertices.emplace_back((i & 1) ? 0.5 : -0.5, (i & 2) ? 0.5 : -0.5, (i & 4) ? 0.5 : -0.5);
    }
    // Outward CCW winding.
    m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                   {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
    return m;
}

Mesh make_sphere() {
    Mesh m;
    const double r = 0.5;
    m.vertices.emplace_back(0, 0, r);
    for (int ring = 1; ring < kSphereRings; ++ring) {
        const double theta = kPi * ring / kSphereRings;
        for (int seg = 0; seg < kSphereSegments; ++seg) {
            const double phi = 2.0 * kPi * seg / kSphereSegments;
            m.vertices.emplace_back(r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
                                    r * std::cos(theta));
        }
    }
    m.vertices.emplace_back(0, 0, -r);
    const int south = static_cast<int>(m.vertices.size()) - 1;
    auto at = [](int ring, int seg) { return 1 + (ring - 1) * kSphereSegments + (seg % kSphereSegments); };
    for (int seg = 0; seg < kSphereSegments; ++seg) m.triangles.push_back({0, at(1, seg), at(1, seg + 1)});
    for (int ring = 1; ring < kSphereRings - 1; ++ring) {
        for (int seg = 0; seg < kSphereSegments; ++seg) {
            m.triangles.push_back({at(ring, seg), at(ring + 1, seg), at(ring + 1, seg + 1)});
            m.triangles.push_back({at(ring, seg), at(ring + 1, seg + 1), at(ring, seg + 1)});
        }
    }
    for (int seg = 0; seg < kSphereSegments; ++seg) {
        m.triangles.push_back({south, at(kSphereRings - 1, seg + 1), at(kSphereRings - 1, seg)});
    }
    return m;
}

// Cylinder when top_radius > 0, cone otherwise.
Mesh make_round(double top_radius) {
    Mesh m;
    const double r = 0.5;
    const int n = kRoundSegments;
    for (int seg = 0; seg < n; ++seg) {
        const double phi = 2.0 * kPi * seg / n;
        m.vertices.emplace_back(r * std::cos(phi), r * std::sin(phi), -0.5);
    }
    const int bottom_center = static_cast<int>(m.vertices.size());
    m.vertices.emplace_back(0, 0, -0.5);
    for (int seg = 0; seg < n; ++seg) m.triangles.push_back({bottom_center, (seg + 1) % n, seg});

    if (top_radius > 0) {
        const int top0 = static_cast<int>(m.vertices.size());
        for (int seg = 0; seg < n; ++seg) {
            const double phi = 2.0 * kPi * seg / n;
            m.vertices.emplace_back(top_radius * std::cos(phi), top_radius * std::sin(phi), 0.5);
        }
        const int top_center = static_cast<int>(m.vertices.size());
        m.vertices.emplace_back(0, 0, 0.5);
        for (int seg = 0; seg < n; ++seg) {
            const int a = seg, b = (seg + 1) % n;
            m.triangles.push_back({a, b, top0 + b});
            m.triangles.push_back({a, top0 + b, top0 + a});
            m.triangles.push_back({top_center, top0 + a, top0 + b});
        }
    } else {
        const int apex = static_cast<int>(m.vertices.size());
        m.vertices.emplace_back(0, 0, 0.5);
        for (int seg = 0; seg < n; ++seg) m.triangles.push_back({seg, (seg + 1) % n, apex});
    }
    return m;
}

Mesh make_plane() {
    Mesh m;
    m.vertices = {{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

} // namespace

const Mesh& primitive_mesh(ShapeKind kind) {
    static const Mesh cube = make_cube();
    static const Mesh sphere = make_sphere();
    static const Mesh cylinder = make_round(0.5);
    static const Mesh cone = make_round(0.0);
    static const Mesh plane = make_plane();
    switch (kind) {
    case ShapeKind::cube: return cube;
    case ShapeKind::sphere: return sphere;
    case ShapeKind::cylinder: return cylinder;
    case ShapeKind::cone: return cone;
    case ShapeKind::plane: return plane;
    case ShapeKind::mesh: break;
    }
    throw Error("primitive_mesh: mesh shapes carry their own geometry");
}

ObjParseError::ObjParseError(int line, const std::string& message)
    : Error(fmt::format("OBJ line {}: {}", line, message)), line_(line) {}

namespace {

bool parse_double(std::string_view tok, double& out) {
    // std::from_chars for double is available in libstdc++ 11.
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

Mesh parse_obj(std::string_view contents) {
    Mesh mesh;
    int line_no = 0;
    for (const std::string& raw : text::split_lines(contents)) {
        ++line_no;
        std::string_view line = text::trim(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = text::rtrim(line.substr(0, hash));
        auto toks = tokens(line);
        if (toks.empty()) continue;
        if (toks[0] == "v") {
            if (toks.size() < 4) throw ObjParseError(line_no, "vertex needs 3 coordinates");
            Vec3 v;
            for (int k = 0; k < 3; ++k) {
                if (!parse_double(toks[k + 1], v[k])) throw ObjParseError(line_no, "malformed vertex coordinate");
            }
            mesh.vertices.push_back(v);
        } else if (toks[0] == "f") {
            if (toks.size() < 4) throw ObjParseError(line_no, "face needs at least 3 vertices");
            std::vector<int> idx;
            const int count = static_cast<int>(mesh.vertices.size());
            for (size_t k = 1; k < toks.size(); ++k) {
                std::string_view t = toks[k].substr(0, toks[k].find('/'));
                int value = 0;
                auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
                if (ec != std::errc() || ptr != t.data() + t.size() || value == 0) {
                    throw ObjParseError(line_no, fmt::format("malformed face index '{}'", toks[k]));
                }
                const int resolved = value > 0 ? value - 1 : count + value;
                if (resolved < 0 || resolved >= count) {
                    throw ObjParseError(line_no, fmt::format("face index {} out of range (vertex count {})", value, count));
                }
                idx.push_back(resolved);
            }
            for (size_t k = 1; k + 1 < idx.size(); ++k) mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
        }
    }
    return mesh;
}

} // namespace sceneloop::scene
