#pragma once

#include "sceneloop/scene/math.hpp"
#include "sceneloop/scene/mesh.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sceneloop::scene {

struct Material {
    Eigen::Vector4d base_color{0.8, 0.8, 0.8, 1.0};
    double roughness = 0.5;
    double metallic = 0.0;
    Vec3 emissive = Vec3::Zero();
};

enum class LightKind { point, sun };

struct Light {
    std::string name;
    LightKind kind = LightKind::point;
    Vec3 color{1, 1, 1};
    double energy = 1.0;
    Vec3 location = Vec3::Zero();    // point
    Vec3 direction{0, 0, -1};        // sun, unit norm; the direction light travels
};

struct CameraPose {
    Vec3 location = Vec3::Zero();
    Vec3 rotation_euler = Vec3::Zero();
    double fov_y = radians(50.0);
};

enum class Channel { location, rotation_euler, scale };

struct KeyframeSample {
    int frame = 0;
    Channel channel = Channel::location;
    Vec3 value = Vec3::Zero();
};

struct Shape {
    ShapeKind kind = ShapeKind::cube;
    std::string mesh_path;              // only for ShapeKind::mesh
    std::shared_ptr<const Mesh> mesh;   // only for ShapeKind::mesh

    const Mesh& geometry() const { return kind == ShapeKind::mesh ? *mesh : primitive_mesh(kind); }
};

struct SceneObject {
    std::string name;
    Shape shape;
    Vec3 location = Vec3::Zero();
    Vec3 rotation_euler = Vec3::Zero();
    Vec3 scale{1, 1, 1};
    Material material;
    bool visible = true;
    // Sorted by (channel, frame); at most one sample per pair.
    std::vector<KeyframeSample> tracks;
};

struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    Vec3 center() const { return 0.5 * (min + max); }
    double diagonal() const { return (max - min).norm(); }
    void expand(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void expand(const Aabb& other) {
        expand(other.min);
        expand(other.max);
    }
    bool contains(const Aabb& other, double eps = 0.0) const {
        return (other.min.array() >= min.array() - eps).all() && (other.max.array() <= max.array() + eps).all();
    }
};

inline constexpr double kDefaultAmbient = 0.1;

class SceneState {
public:
    SceneState();

    // Objects keep insertion order; lookups are linear over a small vector.
    const std::vector<SceneObject>& objects() const { return objects_; }
    SceneObject* find_object(std::string_view name);
    const SceneObject* find_object(std::string_view name) const;
    void add_object(SceneObject obj);
    bool remove_object(std::string_view name);

    std::vector<Light>& lights() { return lights_; }
    const std::vector<Light>& lights() const { return lights_; }

    const std::vector<std::pair<std::string, CameraPose>>& cameras() const { return cameras_; }
    CameraPose* find_camera(std::string_view name);
    const CameraPose* find_camera(std::string_view name) const;
    void add_camera(std::string name, CameraPose pose);
    bool remove_camera(std::string_view name);

    const std::optional<std::string>& active_camera() const { return active_camera_; }
    void set_active_camera(std::optional<std::string> name);
    const CameraPose* active_camera_pose() const;

    Vec3 background{0.05, 0.05, 0.05};
    double ambient = kDefaultAmbient;
    int current_frame = 0;

    std::vector<SceneObject>& mutable_objects() { return objects_; }

private:
    std::vector<SceneObject> objects_;
    std::vector<Light> lights_;
    std::vector<std::pair<std::string, CameraPose>> cameras_;
    std::optional<std::string> active_camera_;
};

} // namespace sceneloop::scene
