#include "sceneloop/memory/memory.hpp"

#include "sceneloop/util/base64.hpp"

#include <fmt/format.h>

namespace sceneloop::memory {

using tools::Phase;

ContextMemory::ContextMemory(int window, int image_cap) : window_(window), image_cap_(image_cap) {
    if (window < 1) throw Error("memory window must be positive");
    if (image_cap < 0) throw Error("image cap must be non-negative");
}

RoundRecord& ContextMemory::open_round() {
    if (open_) throw StateError(fmt::format("round {} is still open", open_->index));
    open_.emplace();
    open_->index = next_index_;
    return *open_;
}

RoundRecord& ContextMemory::current() {
    if (!open_) throw StateError("no round is open");
    return *open_;
}

const RoundRecord& ContextMemory::current() const {
    if (!open_) throw StateError("no round is open");
    return *open_;
}

void ContextMemory::record_tool_event(ToolEvent event) {
    if (!open_) throw StateError("tool event recorded while no round is open");
    open_->events.push_back(std::move(event));
}

void ContextMemory::record_tool_event(Phase phase, tools::ToolCall call, tools::ToolResult result) {
    ToolEvent e;
    e.phase = phase;
    e.call = std::move(call);
    e.result = std::move(result);
    record_tool_event(std::move(e));
}

void ContextMemory::record_warning(Phase phase, std::string note) {
    ToolEvent e;
    e.phase = phase;
    e.kind = ToolEvent::Kind::warning;
    e.note = std::move(note);
    record_tool_event(std::move(e));
}

void ContextMemory::commit_round() {
    if (!open_) throw StateError("no round is open");
    RoundRecord r = std::move(*open_);
    open_.reset();
    append_round(std::move(r));
}

std::optional<RoundRecord> ContextMemory::discard_round() {
    auto r = std::move(open_);
    open_.reset();
    return r;
}

void ContextMemory::append_round(RoundRecord record) {
    if (record.index != next_index_)
        throw IndexError(fmt::format("round index {} does not follow {}", record.index, next_index_ - 1));
    if (open_ && open_->index == record.index) throw StateError("round is open; commit it instead");
    rounds_.push_back(std::move(record));
    ++next_index_;
    while (static_cast<int>(rounds_.size()) > window_) rounds_.pop_front();
}

namespace {

json image_json(const scene::Image& img, bool inline_images) {
    if (inline_images) return {{"png", base64::encode(scene::encode_png(img))}};
    return {{"width", img.width()}, {"height", img.height()}};
}

std::vector<scene::Image> images_from(const json& arr) {
    std::vector<scene::Image> out;
    for (const auto& j : arr) {
        if (!j.contains("png")) continue;
        const auto bytes = base64::decode(j.at("png").get<std::string>());
        out.push_back(scene::decode_png(bytes));
    }
    return out;
}

} // namespace

json event_to_json(const ToolEvent& e, bool inline_images) {
    json j = {{"phase", tools::to_string(e.phase)}};
    if (e.kind == ToolEvent::Kind::warning) {
        j["kind"] = "warning";
        j["note"] = e.note;
        return j;
    }
    j["kind"] = "call";
    j["tool"] = e.call.name;
    j["arguments"] = e.call.arguments;
    j["reasoning"] = e.call.reasoning;
    json images = json::array();
    for (const auto& img : e.result.images) images.push_back(image_json(img, inline_images));
    j["result"] = {{"text", e.result.text},
                   {"error", e.result.error},
                   {"control", tools::to_string(e.result.control)},
                   {"images", std::move(images)}};
    if (e.result.feedback)
        j["result"]["feedback"] = {{"visual_difference", e.result.feedback->visual_difference},
                                   {"edit_suggestion", e.result.feedback->edit_suggestion}};
    return j;
}

ToolEvent event_from_json(const json& j) {
    ToolEvent e;
    e.phase = tools::phase_from_string(j.at("phase").get<std::string>());
    if (j.at("kind") == "warning") {
        e.kind = ToolEvent::Kind::warning;
        e.note = j.at("note").get<std::string>();
        return e;
    }
    e.call.name = j.at("tool").get<std::string>();
    e.call.arguments = j.at("arguments");
    e.call.reasoning = j.value("reasoning", "");
    const json& r = j.at("result");
    e.result.text = r.at("text").get<std::string>();
    e.result.error = r.value("error", false);
    const std::string control = r.value("control", "continue");
    e.result.control = control == "end_generation"     ? tools::Control::end_generation
                       : control == "end_verification" ? tools::Control::end_verification
                                                       : tools::Control::proceed;
    e.result.images = images_from(r.value("images", json::array()));
    if (r.contains("feedback"))
        e.result.feedback = tools::Feedback{r["feedback"].at("visual_difference").get<std::string>(),
                                            r["feedback"].at("edit_suggestion").get<std::string>()};
    return e;
}

json round_to_json(const RoundRecord& r, bool inline_images) {
    json renders = json::array();
    for (const auto& img : r.exec.renders) renders.push_back(image_json(img, inline_images));
    json events = json::array();
    for (const auto& e : r.events) events.push_back(event_to_json(e, inline_images));
    json j = {{"index", r.index},
              {"thought", r.thought},
              {"program", r.program},
              {"diff_text", r.diff_text},
              {"exec",
               {{"success", r.exec.success},
                {"text", r.exec.text},
                {"error_line", r.exec.error_line ? json(*r.exec.error_line) : json(nullptr)},
                {"renders", std::move(renders)}}},
              {"feedback",
               {{"visual_difference", r.feedback.visual_difference},
                {"edit_suggestion", r.feedback.edit_suggestion},
                {"substituted", r.feedback_substituted}}},
              {"events", std::move(events)}};
    if (r.diff) j["diff"] = {{"removals", r.diff->removals}, {"additions", r.diff->additions}};
    return j;
}

RoundRecord round_from_json(const json& j) {
    RoundRecord r;
    r.index = j.at("index").get<int>();
    r.thought = j.value("thought", "");
    r.program = j.value("program", "");
    r.diff_text = j.value("diff_text", "");
    if (j.contains("diff"))
        r.diff = tools::CodeDiff{j["diff"].at("removals").get<std::vector<std::string>>(),
                                 j["diff"].at("additions").get<std::vector<std::string>>()};
    const json& x = j.at("exec");
    r.exec.success = x.at("success").get<bool>();
    r.exec.text = x.value("text", "");
    if (!x.at("error_line").is_null()) r.exec.error_line = x["error_line"].get<int>();
    r.exec.renders = images_from(x.value("renders", json::array()));
    const json& f = j.at("feedback");
    r.feedback = {f.value("visual_difference", ""), f.value("edit_suggestion", "")};
    r.feedback_substituted = f.value("substituted", false);
    for (const auto& e : j.value("events", json::array())) r.events.push_back(event_from_json(e));
    return r;
}

json ContextMemory::to_json() const {
    json targets = json::array();
    for (const auto& t : pinned_.targets) targets.push_back(image_json(t, true));
    json plan = nullptr;
    if (pinned_.plan)
        plan = {{"overall_description", pinned_.plan->overall_description},
                {"detailed_plan", pinned_.plan->detailed_plan}};
    json rounds = json::array();
    for (const auto& r : rounds_) rounds.push_back(round_to_json(r, true));
    json j = {{"schema_version", kMemorySchemaVersion},
              {"window", window_},
              {"image_cap", image_cap_},
              {"next_index", next_index_},
              {"pinned", {{"task", pinned_.task}, {"targets", std::move(targets)}, {"plan", std::move(plan)}}},
              {"rounds", std::move(rounds)},
              {"open_round", open_ ? round_to_json(*open_, true) : json(nullptr)}};
    return j;
}

ContextMemory ContextMemory::from_json(const json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != kMemorySchemaVersion)
        throw Error(fmt::format("unsupported memory schema_version {} (expected {})", version, kMemorySchemaVersion));
    ContextMemory m(j.at("window").get<int>(), j.at("image_cap").get<int>());
    const json& p = j.at("pinned");
    m.pinned_.task = p.at("task").get<std::string>();
    m.pinned_.targets = images_from(p.at("targets"));
    if (!p.at("plan").is_null())
        m.pinned_.plan = tools::Plan{p["plan"].at("overall_description").get<std::string>(),
                                     p["plan"].at("detailed_plan").get<std::string>()};
    for (const auto& r : j.at("rounds")) m.rounds_.push_back(round_from_json(r));
    m.next_index_ = j.at("next_index").get<int>();
    if (!j.at("open_round").is_null()) m.open_ = round_from_json(j["open_round"]);
    return m;
}

} // namespace sceneloop::memory
