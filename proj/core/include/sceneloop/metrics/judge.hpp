#pragma once

#include "sceneloop/backend/chat.hpp"

#include <optional>

namespace sceneloop::metrics {

struct JudgeResult {
    double score = 0;  // [0, 5]
    std::string rationale;
    std::vector<std::string> warnings;
};

class JudgeParseError : public Error {
public:
    using Error::Error;
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual JudgeResult score(const scene::Image& target, const scene::Image& final, const std::string& instruction) = 0;
    virtual std::string name() const = 0;
};

// Offline stand-in: PL < 2 -> 5, < 5 -> 4, < 10 -> 3, < 20 -> 2, < 40 -> 1, else 0.
double stub_score_for_pl(double pl);

class StubJudge final : public Judge {
public:
    JudgeResult score(const scene::Image& target, const scene::Image& final, const std::string& instruction) override;
    std::string name() const override { return "stub-pl-thresholds"; }
};

// Extracts {"score": number, "rationale": string} from a reply; the score is
// clamped to [0, 5] with a warning. nullopt when no score is present.
std::optional<JudgeResult> parse_judge_reply(std::string_view text);

// Asks a chat backend with a fixed rubric; one reprompt on an unparsable
// reply, then JudgeParseError.
class BackendJudge final : public Judge {
public:
    explicit BackendJudge(backend::Backend& backend) : backend_(backend) {}
    JudgeResult score(const scene::Image& target, const scene::Image& final, const std::string& instruction) override;
    std::string name() const override { return "vlm-judge"; }

    static const std::string& rubric();

private:
    backend::Backend& backend_;
};

} // namespace sceneloop::metrics
