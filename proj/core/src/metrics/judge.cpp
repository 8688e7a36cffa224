#include "sceneloop/metrics/judge.hpp"

#include "sceneloop/backend/lenient.hpp"
#include "sceneloop/metrics/image_metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace sceneloop::metrics {

double stub_score_for_pl(double pl) {
    if (pl < 2) return 5;
    if (pl < 5) return 4;
    if (pl < 10) return 3;
    if (pl < 20) return 2;
    if (pl < 40) return 1;
    return 0;
}

JudgeResult StubJudge::score(const scene::Image& target, const scene::Image& final, const std::string&) {
    const double pl = photometric_loss(target, final);
    return {stub_score_for_pl(pl), fmt::format("stub judge: PL {:.4f}", pl), {}};
}

namespace {

bool has_score(const nlohmann::json& j) { return j.is_object() && j.contains("score") && j["score"].is_number(); }

} // namespace

std::optional<JudgeResult> parse_judge_reply(std::string_view text) {
    auto span = backend::find_json_object(text, &has_score);
    if (!span) return std::nullopt;
    JudgeResult r;
    const double raw = span->value["score"].get<double>();
    if (!std::isfinite(raw)) return std::nullopt;
    r.score = std::clamp(raw, 0.0, 5.0);
    if (r.score != raw) r.warnings.push_back(fmt::format("judge score {} clamped to {}", raw, r.score));
    if (span->value.contains("rationale") && span->value["rationale"].is_string())
        r.rationale = span->value["rationale"].get<std::string>();
    return r;
}

const std::string& BackendJudge::rubric() {
    static const std::string r =
        "You grade how well a rendered scene accomplishes a task. The first image is the target, the second is the "
        "result. Rate from 0 to 5, weighing task completion, visual quality and spatial accuracy equally "
        "(0 = unrelated, 5 = indistinguishable). Reply with only a JSON object: {\"score\": <number>, "
        "\"rationale\": <one sentence>}.";
    return r;
}

JudgeResult BackendJudge::score(const scene::Image& target, const scene::Image& final, const std::string& instruction) {
    backend::ChatRequest req;
    req.stream = backend::Stream::judge;
    req.messages.push_back(backend::ChatMessage::system(rubric()));
    backend::ChatMessage user = backend::ChatMessage::user("Task: " + instruction);
    user.add_text("Target:").add_image(target).add_text("Result:").add_image(final);
    req.messages.push_back(std::move(user));

    for (int attempt = 0; attempt < 2; ++attempt) {
        const backend::ChatMessage reply = backend_.chat(req);
        if (auto r = parse_judge_reply(reply.text())) return *r;
        req.messages.push_back(reply);
        req.messages.push_back(backend::ChatMessage::user(
            "That reply had no score. Answer with only {\"score\": <0-5>, \"rationale\": \"...\"}."));
    }
    throw JudgeParseError("judge gave no parsable score after one reprompt");
}

} // namespace sceneloop::metrics
