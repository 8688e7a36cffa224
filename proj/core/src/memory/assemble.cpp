#include "sceneloop/memory/assemble.hpp"

#include <fmt/format.h>

namespace sceneloop::memory {

using backend::ChatMessage;

namespace {

constexpr const char* kOneCallRule =
    "Every reply must contain exactly one tool call. Put a short explanation of why you are making that call in the "
    "message text next to it. To use several tools, call them one after another in separate replies.";

constexpr const char* kLanguageNotes = R"(Scene programs use the .scn language, one statement per line:
  verb key=value key=value ...
Values are "quoted strings", numbers, true/false, or tuples like (1, 2, 0.5). A # starts a comment.
Every run rebuilds the world from an empty scene, so each program must be complete.
Statements:
  add_primitive name="n" shape="cube|sphere|cylinder|cone|plane" location=(x,y,z) rotation=(rx,ry,rz) scale=(sx,sy,sz) color=(r,g,b) roughness=0.5 metallic=0 emissive=(r,g,b)
  add_mesh name="n" path="file.obj" (same transform and material keys)
  add_light name="n" kind="point|sun" color=(r,g,b) energy=e location=(x,y,z) | direction=(dx,dy,dz)
  add_camera name="n" location=(x,y,z) rotation=(rx,ry,rz) | look_at=(x,y,z) fov_y=radians
  set_active_camera name="n"
  set_material name="n" color=... roughness=... metallic=... emissive=...
  set_transform name="n" location=... rotation=... scale=...
  set_visibility name="n" visible=true|false
  set_keyframe name="n" frame=k location=... rotation=... scale=...
  set_background color=(r,g,b) ambient=a
  delete name="n"
Primitives are unit sized and centred on the origin (cube edge 1, sphere radius 0.5, cylinder and cone radius 0.5 and
height 1 along Z, plane 1x1 in XY). Rotations are XYZ Euler angles in radians. Z is up. Cameras look down their local
-Z axis; look_at aims a camera at a point with Z up. The first camera added becomes the active camera.)";

std::string generator_system() {
    return fmt::format(
        "[Role]\nYou write scene programs that reproduce a target scene. You are given a task description and one "
        "or more target images. Work in rounds: inspect, plan, then submit a complete program with execute_code. "
        "Each successful submission is rendered and reviewed by a separate verifier whose notes come back to you in "
        "the next round. Call make_plan before your first program. Call end_process once the render matches the "
        "target.\n\n[Language]\n{}\n\n[Reply format]\n{}",
        kLanguageNotes, kOneCallRule);
}

std::string verifier_system() {
    return fmt::format(
        "[Role]\nYou review scene renders against a target. You are given the target images and description, the "
        "generator's plan, the recent programs with their edits and reasoning, and the render of the current "
        "program. Inspect the scene with the camera, visibility and keyframe tools, find where it differs from the "
        "target, and finish with end_process giving the visual differences and concrete edits for the next "
        "program.\n\n[Reply format]\n{}",
        kOneCallRule);
}

ChatMessage task_message(const Pinned& p) {
    ChatMessage m = ChatMessage::user("[Task]\n" + p.task);
    if (!p.targets.empty()) {
        m.add_text(p.targets.size() == 1 ? "[Target image]" : fmt::format("[Target images: {}]", p.targets.size()));
        for (const auto& t : p.targets) m.add_image(t);
    }
    return m;
}

std::optional<ChatMessage> plan_message(const Pinned& p) {
    if (!p.plan) return std::nullopt;
    return ChatMessage::user(fmt::format("[Plan]\nOverall description:\n{}\n\nDetailed plan:\n{}",
                                         p.plan->overall_description, p.plan->detailed_plan));
}

std::string code_edition(const RoundRecord& r) {
    return fmt::format("Thought:\n{}\nCode edition:\n{}\nFull code:\n{}", r.thought.empty() ? "(none)" : r.thought,
                       r.diff_text.empty() ? "(none)" : r.diff_text, r.program.empty() ? "(none)" : r.program);
}

} // namespace

const Prompts& default_prompts() {
    static const Prompts p{generator_system(), verifier_system()};
    return p;
}

std::vector<ChatMessage> assemble_generator_context(const ContextMemory& memory, const Prompts& prompts) {
    std::vector<ChatMessage> out;
    out.push_back(ChatMessage::system(prompts.generator_system));
    out.push_back(task_message(memory.pinned()));
    if (auto plan = plan_message(memory.pinned())) out.push_back(std::move(*plan));

    const auto& rounds = memory.rounds();
    // Newest renders win the image budget.
    std::vector<bool> embed(rounds.size(), false);
    int budget = memory.image_cap();
    for (size_t i = rounds.size(); i-- > 0;) {
        if (rounds[i].exec.renders.empty()) continue;
        if (budget > 0) {
            embed[i] = true;
            --budget;
        }
    }

    for (size_t i = 0; i < rounds.size(); ++i) {
        const RoundRecord& r = rounds[i];
        ChatMessage m = ChatMessage::user(fmt::format("[Round {}]\n{}\nExecution result:\n{}", r.index,
                                                      code_edition(r), r.exec.text));
        if (!r.exec.renders.empty()) {
            if (embed[i]) {
                m.add_text(fmt::format("Render of round {}:", r.index));
                m.add_image(r.exec.renders.front());
            } else {
                m.add_text(fmt::format("[Render of round {} omitted to stay within the image budget]", r.index));
            }
        }
        m.add_text(fmt::format("{}:\nVisual difference: {}\nEdit suggestion: {}",
                               r.feedback_substituted ? "Feedback" : "Verifier feedback", r.feedback.visual_difference,
                               r.feedback.edit_suggestion));
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<ChatMessage> assemble_verifier_context(const ContextMemory& memory, const RoundRecord& current,
                                                   const Prompts& prompts) {
    if (!current.exec.success || current.exec.renders.empty())
        throw PreconditionError(fmt::format("round {} did not execute successfully; nothing to verify", current.index));

    std::vector<ChatMessage> out;
    out.push_back(ChatMessage::system(prompts.verifier_system));
    out.push_back(task_message(memory.pinned()));
    if (auto plan = plan_message(memory.pinned())) out.push_back(std::move(*plan));

    const auto& rounds = memory.rounds();
    const size_t keep = static_cast<size_t>(memory.window() - 1);
    const size_t first = rounds.size() > keep ? rounds.size() - keep : 0;
    for (size_t i = first; i < rounds.size(); ++i)
        out.push_back(ChatMessage::user(fmt::format("[Round {}]\n{}", rounds[i].index, code_edition(rounds[i]))));

    ChatMessage cur = ChatMessage::user(fmt::format("[Current round {}]\n{}", current.index, code_edition(current)));
    cur.add_text(current.exec.renders.size() == 1 ? "Current render:"
                                                  : fmt::format("Current renders: {}", current.exec.renders.size()));
    for (const auto& img : current.exec.renders) cur.add_image(img);
    out.push_back(std::move(cur));
    return out;
}

} // namespace sceneloop::memory
