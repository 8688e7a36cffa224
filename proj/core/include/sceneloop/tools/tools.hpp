#pragma once

#include "sceneloop/engine/engine.hpp"
#include "sceneloop/tools/assets.hpp"
#include "sceneloop/tools/diff.hpp"
#include "sceneloop/tools/result.hpp"
#include "sceneloop/tools/validate.hpp"

#include <array>
#include <optional>

namespace sceneloop::tools {

struct ExecuteContext {
    // Program the diff is checked against (the last submitted code).
    std::string previous_source;
    std::string language = engine::kLanguageScn;
    scene::RenderConfig render;
};

// Everything execute_code learned; `result` is what the model sees.
struct CodeSubmission {
    std::string thought;
    std::string code;
    std::string diff_text;
    std::optional<CodeDiff> diff;
    std::vector<std::string> warnings;
    // Executed and rendered through the active camera.
    bool success = false;
    std::optional<int> error_line;
    std::optional<scene::CameraPose> camera;
    int object_count = 0;
    ToolResult result;
};

// Engine transport failures propagate as EngineError; script failures,
// diff problems and a missing camera are reported in-band.
CodeSubmission tool_execute_code(const ToolCall& call, engine::Engine& engine, const ExecuteContext& ctx);

// Stores the plan in `pinned`, replacing any earlier one.
ToolResult tool_make_plan(const ToolCall& call, std::optional<Plan>& pinned);

ToolResult tool_get_scene_info(engine::Engine& engine);

// A null provider reports that no asset source is configured.
ToolResult tool_get_better_object(const ToolCall& call, AssetProvider* provider);

ToolResult tool_end_process(Phase phase, const ToolCall& call);

// Camera rules behind the verifier tools.
namespace camera {

inline constexpr double kZoomIn = 0.8;
inline constexpr double kZoomOut = 1.25;
inline constexpr double kMoveFraction = 0.25;
inline constexpr double kViewpointScale = 1.5;
inline constexpr double kViewpointFloor = 1.0;
inline constexpr double kViewpointElevation = 0.75;
inline constexpr double kFocusFloor = 0.1;

struct Frame {
    scene::Vec3 right, up, forward;
};
Frame camera_frame(const scene::CameraPose& pose);

// Upper-corner viewpoints in the order (+x,+y), (-x,+y), (-x,-y), (+x,-y).
std::array<scene::CameraPose, 4> corner_viewpoints(const scene::Aabb& box);

scene::CameraPose zoom(const scene::CameraPose& pose, const scene::Vec3& focus, std::string_view direction);

// Moves camera and focus together, so opposite moves cancel exactly.
void move(scene::CameraPose& pose, scene::Vec3& focus, std::string_view direction);

// Aims at `center` from the current side at the framing distance for `radius`.
scene::CameraPose focus_on(const scene::CameraPose& pose, const scene::Vec3& center, double radius);

} // namespace camera

std::string describe_pose(const scene::CameraPose& pose);

// Verifier working state for one round. The session camera is separate from
// the scene's cameras; the generator's active camera is only the start pose.
class VerifierSession {
public:
    VerifierSession(engine::Engine& engine, scene::CameraPose start, int budget, scene::RenderConfig render = {});

    // Executes a validated verification call. Lookup and argument failures
    // come back in-band; EngineError transport failures propagate.
    ToolResult dispatch(const ToolCall& call);

    ToolResult initialize_viewpoint(const std::vector<std::string>& names);
    ToolResult set_camera(const scene::Vec3& location, const scene::Vec3& rotation_euler);
    ToolResult investigate(const std::string& operation, const std::string& direction, const std::string& object_name);
    ToolResult set_visibility(const std::vector<std::string>& show, const std::vector<std::string>& hide);
    ToolResult set_keyframe(int frame);

    const scene::CameraPose& camera() const { return camera_; }
    const scene::Vec3& focus() const { return focus_; }
    int remaining() const { return remaining_; }

private:
    scene::Image render_view();

    engine::Engine& engine_;
    scene::CameraPose camera_;
    scene::Vec3 focus_;
    int remaining_;
    scene::RenderConfig render_;
};

} // namespace sceneloop::tools
