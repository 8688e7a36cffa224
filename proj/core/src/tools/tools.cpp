#include "sceneloop/tools/tools.hpp"

#include "sceneloop/util/text.hpp"

#include <fmt/format.h>

#include <cmath>

namespace sceneloop::tools {

using engine::EngineError;
using scene::CameraPose;
using scene::Vec3;

std::string_view to_string(Control c) {
    switch (c) {
    case Control::proceed: return "continue";
    case Control::end_generation: return "end_generation";
    case Control::end_verification: return "end_verification";
    }
    return "continue";
}

namespace {

std::string vec_text(const Vec3& v) {
    return fmt::format("({}, {}, {})", text::fixed4(v.x()), text::fixed4(v.y()), text::fixed4(v.z()));
}

std::vector<std::string> string_list(const json& j) {
    std::vector<std::string> out;
    for (const auto& v : j) out.push_back(v.get<std::string>());
    return out;
}

Vec3 vec3(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

// Remote faults a model can fix by changing its call.
bool is_request_fault(const EngineError& e) { return e.kind() == EngineError::Kind::remote; }

} // namespace

std::string describe_pose(const CameraPose& pose) {
    return fmt::format("location {}, rotation_euler {}", vec_text(pose.location), vec_text(pose.rotation_euler));
}

CodeSubmission tool_execute_code(const ToolCall& call, engine::Engine& engine, const ExecuteContext& ctx) {
    CodeSubmission sub;
    sub.thought = call.arguments.value("thought", "");
    sub.diff_text = call.arguments.value("code_diff", "");
    sub.code = call.arguments.value("code", "");

    try {
        sub.diff = parse_code_diff(sub.diff_text);
        try {
            const std::string applied = apply_diff(ctx.previous_source, *sub.diff);
            if (!text::equal_modulo_trailing_whitespace(applied, sub.code))
                sub.warnings.push_back("code_diff applied to your previous program does not reproduce `code`; the "
                                       "full `code` was executed");
        } catch (const ApplyError& e) {
            sub.warnings.push_back(std::string(e.what()) + "; the full `code` was executed");
        }
    } catch (const DiffFormatError& e) {
        sub.warnings.push_back(fmt::format("code_diff is malformed ({}); the full `code` was executed", e.what()));
    }

    auto finish = [&](std::string body) {
        for (const auto& w : sub.warnings) body += "\nWarning: " + w;
        sub.result.text = std::move(body);
        sub.result.error = !sub.success;
        return sub;
    };

    engine::ExecReport report;
    try {
        report = engine.execute_program(sub.code, ctx.language);
    } catch (const EngineError& e) {
        if (!is_request_fault(e)) throw;
        return finish(fmt::format("Execution failed: {}{}", e.message(), e.detail().empty() ? "" : "\n" + e.detail()));
    }
    if (!report.ok()) {
        const auto& f = *report.failure;
        sub.error_line = f.line;
        std::string body = fmt::format("Execution failed at line {}: {}", f.line, f.message);
        if (!f.detail.empty() && f.detail != f.message) body += "\nError log:\n" + f.detail;
        return finish(body);
    }
    sub.object_count = report.object_count;
    if (!report.active_camera) {
        return finish("The program ran but the scene has no active camera, so nothing could be rendered. You must "
                      "add a camera in your code (add_camera name=\"Camera\" location=(...) look_at=(...)).");
    }
    sub.camera = report.active_camera;
    try {
        sub.result.images.push_back(engine.render(std::nullopt, ctx.render));
    } catch (const EngineError& e) {
        if (!is_request_fault(e)) throw;
        return finish(fmt::format("The program ran but rendering failed: {}", e.message()));
    }
    sub.success = true;
    return finish(fmt::format("Execution succeeded ({} objects). Render from the active camera ({}) attached; the "
                              "verifier will review it next.",
                              report.object_count, describe_pose(*report.active_camera)));
}

ToolResult tool_make_plan(const ToolCall& call, std::optional<Plan>& pinned) {
    const bool replacing = pinned.has_value();
    pinned = Plan{call.arguments.at("overall_description").get<std::string>(),
                  call.arguments.at("detailed_plan").get<std::string>()};
    ToolResult r;
    r.text = replacing ? "Plan stored. It replaces the previous plan and stays pinned in your context."
                       : "Plan stored. It stays pinned in your context for every round.";
    return r;
}

ToolResult tool_get_scene_info(engine::Engine& engine) {
    ToolResult r;
    r.text = engine.get_scene_info();
    return r;
}

ToolResult tool_get_better_object(const ToolCall& call, AssetProvider* provider) {
    if (!provider) return ToolResult::failure("No asset provider is configured for this run; build the object from "
                                              "primitives instead.");
    const json& a = call.arguments;
    AssetRequest req;
    req.object_name = a.at("object_name").get<std::string>();
    req.reference_type = a.value("reference_type", "");
    req.object_description = a.value("object_description", "");
    req.rig_and_animate = a.value("rig_and_animate", false);
    req.action_description = a.value("action_description", "");
    try {
        const Asset asset = provider->resolve(req);
        ToolResult r;
        r.text = fmt::format("Asset '{}' for '{}' is available at {}.\nImport it with:\nadd_mesh name=\"{}\" "
                             "path=\"{}\" location=(0, 0, 0)",
                             asset.name, req.object_name, asset.path, req.object_name, asset.path);
        return r;
    } catch (const UnsupportedRequest& e) {
        return ToolResult::failure(std::string("Unsupported request: ") + e.what());
    } catch (const ProviderError& e) {
        return ToolResult::failure(std::string("Asset lookup failed: ") + e.what());
    }
}

ToolResult tool_end_process(Phase phase, const ToolCall& call) {
    ToolResult r;
    if (phase == Phase::generation) {
        r.text = "Ending the episode.";
        r.control = Control::end_generation;
        return r;
    }
    r.feedback = Feedback{call.arguments.at("visual_difference").get<std::string>(),
                          call.arguments.at("edit_suggestion").get<std::string>()};
    r.text = "Review recorded.";
    r.control = Control::end_verification;
    return r;
}

namespace camera {

Frame camera_frame(const CameraPose& pose) {
    const scene::Mat3 r = scene::rotation_matrix(pose.rotation_euler);
    return {r.col(0), r.col(1), -r.col(2)};
}

std::array<CameraPose, 4> corner_viewpoints(const scene::Aabb& box) {
    const Vec3 center = box.center();
    const double distance = std::max(kViewpointScale * box.diagonal(), kViewpointFloor);
    const double signs[4][2] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    std::array<CameraPose, 4> poses;
    for (int i = 0; i < 4; ++i) {
        const Vec3 dir = Vec3(signs[i][0], signs[i][1], kViewpointElevation).normalized();
        poses[i].location = center + distance * dir;
        poses[i].rotation_euler = scene::look_at_euler(poses[i].location, center);
        poses[i].fov_y = scene::radians(50.0);
    }
    return poses;
}

CameraPose zoom(const CameraPose& pose, const Vec3& focus, std::string_view direction) {
    const double k = direction == "in" ? kZoomIn : kZoomOut;
    CameraPose out = pose;
    out.location = focus + k * (pose.location - focus);
    return out;
}

void move(CameraPose& pose, Vec3& focus, std::string_view direction) {
    const Frame f = camera_frame(pose);
    Vec3 axis;
    if (direction == "up") axis = f.up;
    else if (direction == "down") axis = -f.up;
    else if (direction == "right") axis = f.right;
    else if (direction == "left") axis = -f.right;
    else if (direction == "in") axis = f.forward;
    else axis = -f.forward;
    const double step = kMoveFraction * std::max((pose.location - focus).norm(), kFocusFloor);
    pose.location += step * axis;
    focus += step * axis;
}

CameraPose focus_on(const CameraPose& pose, const Vec3& center, double radius) {
    Vec3 dir = pose.location - center;
    dir = dir.norm() > 1e-12 ? dir.normalized() : Vec3(-camera_frame(pose).forward);
    const double distance = std::max(kViewpointScale * radius / std::tan(pose.fov_y / 2), kFocusFloor);
    CameraPose out = pose;
    out.location = center + distance * dir;
    out.rotation_euler = scene::look_at_euler(out.location, center);
    return out;
}

} // namespace camera

VerifierSession::VerifierSession(engine::Engine& engine, CameraPose start, int budget, scene::RenderConfig render)
    : engine_(engine), camera_(start), remaining_(budget), render_(render) {
    focus_ = engine_.list_bounds({}, std::nullopt).box.center();
}

scene::Image VerifierSession::render_view() { return engine_.render(camera_, render_); }

ToolResult VerifierSession::dispatch(const ToolCall& call) {
    if (remaining_ > 0) --remaining_;
    const json& a = call.arguments;
    try {
        if (call.name == "initialize_viewpoint") return initialize_viewpoint(string_list(a.at("object_names")));
        if (call.name == "set_camera") return set_camera(vec3(a.at("location")), vec3(a.at("rotation_euler")));
        if (call.name == "investigate")
            return investigate(a.at("operation").get<std::string>(), a.value("direction", ""), a.value("object_name", ""));
        if (call.name == "set_visibility")
            return set_visibility(string_list(a.at("show_objects")), string_list(a.at("hide_objects")));
        if (call.name == "set_keyframe") return set_keyframe(static_cast<int>(a.at("frame_number").get<double>()));
        if (call.name == "get_scene_info") return tool_get_scene_info(engine_);
        if (call.name == "end_process") return tool_end_process(Phase::verification, call);
    } catch (const EngineError& e) {
        if (!is_request_fault(e)) throw;
        const std::string label = e.remote_kind() == engine::fault::not_found ? "NotFound"
                                  : e.remote_kind() == engine::fault::overlap ? "OverlapError"
                                                                               : "Error";
        return ToolResult::failure(fmt::format("{}: {}", label, e.message()));
    }
    return ToolResult::failure("unknown verification tool '" + call.name + "'");
}

ToolResult VerifierSession::initialize_viewpoint(const std::vector<std::string>& names) {
    const scene::Aabb box = engine_.list_bounds(names, std::nullopt).box;
    const auto poses = camera::corner_viewpoints(box);
    ToolResult r;
    r.text = fmt::format("Bounding box min {}, max {}, center {}.", vec_text(box.min), vec_text(box.max),
                         vec_text(box.center()));
    for (size_t i = 0; i < poses.size(); ++i) {
        r.text += fmt::format("\nViewpoint {}: {}", i + 1, describe_pose(poses[i]));
        r.images.push_back(engine_.render(poses[i], render_));
    }
    focus_ = box.center();
    return r;
}

ToolResult VerifierSession::set_camera(const Vec3& location, const Vec3& rotation_euler) {
    camera_.location = location;
    camera_.rotation_euler = rotation_euler;
    ToolResult r;
    r.text = "Camera set to " + describe_pose(camera_) + ".";
    r.images.push_back(render_view());
    return r;
}

ToolResult VerifierSession::investigate(const std::string& operation, const std::string& direction,
                                        const std::string& object_name) {
    if (operation == "zoom") {
        camera_ = camera::zoom(camera_, focus_, direction);
    } else if (operation == "move") {
        camera::move(camera_, focus_, direction);
    } else {
        const auto report = engine_.list_bounds({object_name}, std::nullopt);
        const auto& b = report.objects.at(0);
        focus_ = b.box.center();
        camera_ = camera::focus_on(camera_, focus_, b.radius);
    }
    ToolResult r;
    r.text = fmt::format("Camera now at {}; focus point {}, distance {}.", describe_pose(camera_), vec_text(focus_),
                         text::fixed4((camera_.location - focus_).norm()));
    r.images.push_back(render_view());
    return r;
}

ToolResult VerifierSession::set_visibility(const std::vector<std::string>& show, const std::vector<std::string>& hide) {
    engine_.set_visibility(show, hide);
    ToolResult r;
    r.text = fmt::format("Visibility updated ({} shown, {} hidden).", show.size(), hide.size());
    r.images.push_back(render_view());
    return r;
}

ToolResult VerifierSession::set_keyframe(int frame) {
    engine_.set_frame(frame);
    ToolResult r;
    r.text = fmt::format("Scene posed at frame {}.", frame);
    r.images.push_back(render_view());
    return r;
}

} // namespace sceneloop::tools
