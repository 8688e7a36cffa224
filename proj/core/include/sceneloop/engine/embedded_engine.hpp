#pragma once

#include "sceneloop/engine/engine.hpp"
#include "sceneloop/scene/interpreter.hpp"

namespace sceneloop::engine {

class EmbeddedEngine final : public Engine {
public:
    explicit EmbeddedEngine(scene::ExecOptions options = {});

    void reset() override;
    ExecReport execute_program(const std::string& source, const std::string& language) override;
    Image render(const std::optional<CameraPose>& camera, const RenderConfig& config) override;
    std::string get_scene_info() override;
    void set_camera(const CameraPose& pose) override;
    void set_frame(int frame) override;
    void set_visibility(const std::vector<std::string>& show, const std::vector<std::string>& hide) override;
    BoundsReport list_bounds(const std::vector<std::string>& names, std::optional<int> frame) override;
    void shutdown() override {}

    const scene::SceneState& state() const { return state_; }

private:
    scene::ExecOptions options_;
    scene::SceneState state_;
};

} // namespace sceneloop::engine
