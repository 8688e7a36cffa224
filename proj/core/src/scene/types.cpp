#include "sceneloop/scene/types.hpp"

#include <algorithm>

namespace sceneloop::scene {

SceneState::SceneState() = default;

SceneObject* SceneState::find_object(std::string_view name) {
    auto it = std::find_if(objects_.begin(), objects_.end(), [&](const SceneObject& o) { return o.name == name; });
    return it == objects_.end() ? nullptr : &*it;
}

const SceneObject* SceneState::find_object(std::string_view name) const {
    return const_cast<SceneState*>(this)->find_object(name);
}

void SceneState::add_object(SceneObject obj) {
    if (find_object(obj.name)) throw Error("duplicate object name '" + obj.name + "'");
    objects_.push_back(std::move(obj));
}

bool SceneState::remove_object(std::string_view name) {
    auto it = std::find_if(objects_.begin(), objects_.end(), [&](const SceneObject& o) { return o.name == name; });
    if (it == objects_.end()) return false;
    objects_.erase(it);
    return true;
}

CameraPose* SceneState::find_camera(std::string_view name) {
    auto it = std::find_if(cameras_.begin(), cameras_.end(), [&](const auto& c) { return c.first == name; });
    return it == cameras_.end() ? nullptr : &it->second;
}

const CameraPose* SceneState::find_camera(std::string_view name) const {
    return const_cast<SceneState*>(this)->find_camera(name);
}

void SceneState::add_camera(std::string name, CameraPose pose) {
    if (find_camera(name)) throw Error("duplicate camera name '" + name + "'");
    cameras_.emplace_back(std::move(name), pose);
}

bool SceneState::remove_camera(std::string_view name) {
    auto it = std::find_if(cameras_.begin(), cameras_.end(), [&](const auto& c) { return c.first == name; });
    if (it == cameras_.end()) return false;
    const bool was_active = active_camera_ && *active_camera_ == name;
    cameras_.erase(it);
    if (was_active) active_camera_.reset();
    return true;
}

void SceneState::set_active_camera(std::optional<std::string> name) {
    if (name && !find_camera(*name)) throw Error("no camera named '" + *name + "'");
    active_camera_ = std::move(name);
}

const CameraPose* SceneState::active_camera_pose() const {
    return active_camera_ ? find_camera(*active_camera_) : nullptr;
}

} // namespace sceneloop::scene
