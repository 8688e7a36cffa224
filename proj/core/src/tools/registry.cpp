#include "sceneloop/tools/registry.hpp"

#include <algorithm>

namespace sceneloop::tools {

std::string_view to_string(Phase phase) { return phase == Phase::generation ? "generation" : "verification"; }

Phase phase_from_string(std::string_view s) {
    if (s == "generation") return Phase::generation;
    if (s == "verification") return Phase::verification;
    throw Error("unknown phase '" + std::string(s) + "'");
}

const ParamSpec* ToolSpec::find(std::string_view param) const {
    for (const ParamSpec& p : params)
        if (p.name == param) return &p;
    return nullptr;
}

json ToolSpec::to_json() const {
    json props = json::object();
    for (const ParamSpec& p : params) {
        json j = {{"type", p.type}, {"description", p.description}};
        if (!p.enum_values.empty()) j["enum"] = p.enum_values;
        if (p.type == "array") j["items"] = {{"type", p.item_type}, {"description", p.item_description}};
        props[p.name] = std::move(j);
    }
    json parameters = {{"type", "object"}, {"properties", std::move(props)}, {"required", required}};
    return {{"type", "function"}, {"function", {{"name", name}, {"description", description}, {"parameters", parameters}}}};
}

namespace {

ParamSpec str(std::string name, std::string description, std::vector<std::string> enums = {}) {
    return {std::move(name), "string", std::move(description), std::move(enums), {}, {}};
}

ParamSpec array(std::string name, std::string item_type, std::string description, std::string item_description) {
    return {std::move(name), "array", std::move(description), {}, std::move(item_type), std::move(item_description)};
}

std::vector<ToolSpec> build_generation() {
    std::vector<ToolSpec> specs;
    specs.push_back({"execute_code",
                     "Run a complete scene program (.scn) in the engine. If it fails you get the failing line and "
                     "error log back. If it succeeds you get a render through the scene's active camera (the "
                     "program has to create one with add_camera) and then review notes from the verifier.",
                     {str("thought", "Your reasoning about the current scene and what to change in this version."),
                      str("code_diff",
                          "The line-level edit from your previous program to this one, in exactly this form:\n"
                          "-: [removed lines]\n+: [added lines]\n"
                          "Removals come first. Use `-: []` when writing a program from scratch. Lines are literal "
                          "program lines with no markdown fences and no commentary."),
                      str("code", "The full program after the edit, unchanged lines included. This text is what "
                                  "gets executed.")},
                     {"thought", "code_diff", "code"}});
    specs.push_back({"get_scene_info",
                     "Summarise the current scene as text: objects with shape, location, rotation, scale and "
                     "visibility, then lights, cameras, the active camera and the keyframe range.",
                     {},
                     {}});
    specs.push_back({"end_process", "Stop the episode. Call it once the scene matches the target.", {}, {}});
    specs.push_back({"make_plan",
                     "Record a written plan for the scene. Nothing new is returned; the plan stays in your context "
                     "for later rounds. Call it before your first program. Calling it again replaces the plan.",
                     {str("overall_description",
                          "What the target scene contains: the objects, their sizes, colours and placement, the "
                          "lighting and the camera framing."),
                      str("detailed_plan",
                          "Ordered construction stages, e.g. fetch assets, block out the layout with camera and key "
                          "light, place and size the objects, then refine materials and secondary lights.")},
                     {"overall_description", "detailed_plan"}});
    specs.push_back(
        {"get_better_object",
         "Fetch a detailed mesh for an object that basic primitives cannot represent well. Returns a local OBJ path "
         "to use with add_mesh. The returned asset already carries its own look; do not recolour it.",
         {str("thought", "Why this object needs a dedicated asset and how it fits the plan."),
          str("object_name", "Short object name to look up, such as 'chair' or 'lamp'."),
          str("reference_type", "Use \"image\" when the object is clearly visible in the target image, otherwise "
                                "\"text\" together with object_description.",
              {"text", "image"}),
          str("object_description", "Required when reference_type is \"text\": a description of the object."),
          {"rig_and_animate", "boolean", "Whether the asset should be rigged and animated (dynamic scenes only).", {},
           {}, {}},
          str("action_description", "Required when rig_and_animate is true: the action as plain verbs, such as "
                                    "walk or jump.")},
         {"thought", "object_name"}});
    return specs;
}

std::vector<ToolSpec> build_verification() {
    std::vector<ToolSpec> specs;
    specs.push_back({"initialize_viewpoint",
                     "Frame the listed objects from four upper corners of their joint bounding box. Returns the four "
                     "camera poses and their renders; pick one as a starting point for set_camera.",
                     {array("object_names", "string",
                            "Objects to frame. They must exist in the scene. An empty list frames the whole scene.",
                            "Name of an object to frame.")},
                     {"object_names"}});
    specs.push_back({"set_camera",
                     "Move the inspection camera to a pose and render from it.",
                     {array("location", "number", "Camera position as [x, y, z] in world units.",
                            "One coordinate of the camera position."),
                      array("rotation_euler", "number", "Camera orientation as XYZ Euler angles [x, y, z] in radians.",
                            "One Euler angle in radians.")},
                     {"location", "rotation_euler"}});
    specs.push_back({"investigate",
                     "Adjust the inspection camera and render: zoom toward or away from the focus point, move the "
                     "camera in its own frame, or focus on one object.",
                     {str("operation", "Which adjustment to make.", {"zoom", "move", "focus"}),
                      str("object_name", "For focus: the object to frame. It must exist in the scene."),
                      str("direction", "For move: up, down, left, right, in or out. For zoom: in or out.",
                          {"up", "down", "left", "right", "in", "out"})},
                     {"operation"}});
    specs.push_back({"set_visibility",
                     "Show or hide objects, then render. Objects not listed keep their current visibility.",
                     {array("show_objects", "string", "Objects to make visible. They must exist in the scene.",
                            "Name of an object to show."),
                      array("hide_objects", "string", "Objects to hide. They must exist in the scene.",
                            "Name of an object to hide.")},
                     {"show_objects", "hide_objects"}});
    specs.push_back({"set_keyframe",
                     "Pose the scene at a frame of its animation and render.",
                     {{"frame_number", "integer", "Frame to display (0 or greater).", {}, {}, {}}},
                     {"frame_number"}});
    specs.push_back({"get_scene_info", "Summarise the current scene as text.", {}, {}});
    specs.push_back({"end_process",
                     "Finish the review and hand your findings to the generator.",
                     {str("visual_difference",
                          "How the current render differs from the target. Cover the camera, missing or extra "
                          "objects, materials and colours, layout (with concrete offsets or angles where possible), "
                          "lighting and background, and for animated scenes the motion at specific frames."),
                      str("edit_suggestion", "Concrete program edits that would close those differences.")},
                     {"visual_difference", "edit_suggestion"}});
    return specs;
}

} // namespace

const std::vector<ToolSpec>& tool_specs(Phase phase) {
    static const std::vector<ToolSpec> generation = build_generation();
    static const std::vector<ToolSpec> verification = build_verification();
    return phase == Phase::generation ? generation : verification;
}

const ToolSpec* find_tool(Phase phase, std::string_view name) {
    for (const ToolSpec& s : tool_specs(phase))
        if (s.name == name) return &s;
    return nullptr;
}

json phase_schemas(Phase phase, const std::vector<std::string>& only) {
    json arr = json::array();
    for (const ToolSpec& s : tool_specs(phase)) {
        if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
        arr.push_back(s.to_json());
    }
    return arr;
}

json export_schemas() {
    return {{"generation", phase_schemas(Phase::generation)}, {"verification", phase_schemas(Phase::verification)}};
}

} // namespace sceneloop::tools
