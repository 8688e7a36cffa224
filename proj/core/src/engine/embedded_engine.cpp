#include "sceneloop/engine/embedded_engine.hpp"

#include "sceneloop/scene/scene_info.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace sceneloop::engine {

using Kind = EngineError::Kind;

EmbeddedEngine::EmbeddedEngine(scene::ExecOptions options) : options_(std::move(options)) {}

void EmbeddedEngine::reset() { state_ = scene::SceneState{}; }

ExecReport EmbeddedEngine::execute_program(const std::string& source, const std::string& language) {
    if (language != kLanguageScn) {
        throw EngineError(Kind::remote, fmt::format("the embedded engine only runs '{}' programs (got '{}')",
                                                    kLanguageScn, language),
                          fault::unsupported_language);
    }
    ExecReport report;
    try {
        state_ = scene::execute_source(source, options_);
    } catch (const scene::ExecError& e) {
        report.failure = ExecFailure{e.line(), e.message(), e.what()};
        return report;
    }
    if (const auto* cam = state_.active_camera_pose()) report.active_camera = *cam;
    report.object_count = static_cast<int>(state_.objects().size());
    return report;
}

Image EmbeddedEngine::render(const std::optional<CameraPose>& camera, const RenderConfig& config) {
    if (config.width <= 0 || config.height <= 0) {
        throw EngineError(Kind::remote, "render resolution must be positive", fault::invalid_argument);
    }
    if (camera) {
        if (!(camera->fov_y > 0 && camera->fov_y < scene::kPi)) {
            throw EngineError(Kind::remote, "fov_y must lie inside (0, pi)", fault::invalid_argument);
        }
        return scene::render(state_, *camera, config);
    }
    const CameraPose* active = state_.active_camera_pose();
    if (!active) throw EngineError(Kind::remote, "the scene has no active camera", fault::no_camera);
    return scene::render(state_, *active, config);
}

std::string EmbeddedEngine::get_scene_info() { return scene::format_scene_info(state_); }

void EmbeddedEngine::set_camera(const CameraPose& pose) {
    if (!(pose.fov_y > 0 && pose.fov_y < scene::kPi)) {
        throw EngineError(Kind::remote, "fov_y must lie inside (0, pi)", fault::invalid_argument);
    }
    if (!state_.active_camera()) {
        if (!state_.find_camera("Camera")) state_.add_camera("Camera", pose);
        state_.set_active_camera("Camera");
    }
    *state_.find_camera(*state_.active_camera()) = pose;
}

void EmbeddedEngine::set_frame(int frame) {
    if (frame < 0) throw EngineError(Kind::remote, "frame must be non-negative", fault::invalid_argument);
    state_.current_frame = frame;
}

void EmbeddedEngine::set_visibility(const std::vector<std::string>& show, const std::vector<std::string>& hide) {
    for (const auto& s : show) {
        if (std::find(hide.begin(), hide.end(), s) != hide.end()) {
            throw EngineError(Kind::remote, fmt::format("'{}' appears in both show and hide lists", s), fault::overlap);
        }
    }
    for (const auto* list : {&show, &hide}) {
        for (const auto& n : *list) {
            if (!state_.find_object(n)) throw EngineError(Kind::remote, fmt::format("no object named '{}'", n), fault::not_found, n);
        }
    }
    for (const auto& n : show) state_.find_object(n)->visible = true;
    for (const auto& n : hide) state_.find_object(n)->visible = false;
}

BoundsReport EmbeddedEngine::list_bounds(const std::vector<std::string>& names, std::optional<int> frame) {
    const int f = frame.value_or(state_.current_frame);
    if (f < 0) throw EngineError(Kind::remote, "frame must be non-negative", fault::invalid_argument);
    BoundsReport report;
    try {
        report.objects = scene::bounds_of(state_, names, f);
    } catch (const scene::NotFound& e) {
        throw EngineError(Kind::remote, e.what(), fault::not_found, e.name());
    }
    if (!report.objects.empty()) {
        report.box = report.objects.front().box;
        for (const auto& b : report.objects) report.box.expand(b.box);
    }
    return report;
}

} // namespace sceneloop::engine
