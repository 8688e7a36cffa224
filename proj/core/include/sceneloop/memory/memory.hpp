#pragma once

#include "sceneloop/tools/diff.hpp"
#include "sceneloop/tools/result.hpp"
#include "sceneloop/tools/validate.hpp"

#include <nlohmann/json.hpp>

#include <deque>
#include <optional>

namespace sceneloop::memory {

using nlohmann::json;

class StateError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

struct ToolEvent {
    enum class Kind { call, warning };
    tools::Phase phase = tools::Phase::generation;
    Kind kind = Kind::call;
    tools::ToolCall call;      // kind == call
    tools::ToolResult result;  // kind == call
    std::string note;          // kind == warning
};

struct ExecOutcome {
    bool success = false;
    std::string text;
    std::optional<int> error_line;
    std::vector<scene::Image> renders;  // non-empty on success
};

struct RoundRecord {
    int index = 0;
    std::string thought;
    std::string program;
    std::string diff_text;
    std::optional<tools::CodeDiff> diff;
    ExecOutcome exec;
    tools::Feedback feedback;
    // The verifier did not produce the feedback (failed execution, or the
    // review ended without end_process).
    bool feedback_substituted = false;
    std::vector<ToolEvent> events;
};

struct Pinned {
    std::string task;
    std::vector<scene::Image> targets;
    std::optional<tools::Plan> plan;
};

inline constexpr int kDefaultWindow = 12;
inline constexpr int kDefaultImageCap = 6;

// Pinned task, targets and plan plus the last `window` rounds. Pinned content
// is never evicted.
class ContextMemory {
public:
    explicit ContextMemory(int window = kDefaultWindow, int image_cap = kDefaultImageCap);

    Pinned& pinned() { return pinned_; }
    const Pinned& pinned() const { return pinned_; }
    const std::deque<RoundRecord>& rounds() const { return rounds_; }
    int window() const { return window_; }
    int image_cap() const { return image_cap_; }
    // Index the next round must carry; counts evicted rounds too.
    int next_index() const { return next_index_; }

    // Starts the round with index next_index().
    RoundRecord& open_round();
    bool has_open_round() const { return open_.has_value(); }
    RoundRecord& current();
    const RoundRecord& current() const;

    void record_tool_event(ToolEvent event);
    void record_tool_event(tools::Phase phase, tools::ToolCall call, tools::ToolResult result);
    void record_warning(tools::Phase phase, std::string note);

    // append_round(open round).
    void commit_round();
    // Drops the open round without recording it.
    std::optional<RoundRecord> discard_round();
    void append_round(RoundRecord record);

    json to_json() const;
    static ContextMemory from_json(const json& j);

private:
    int window_;
    int image_cap_;
    int next_index_ = 0;
    Pinned pinned_;
    std::deque<RoundRecord> rounds_;
    std::optional<RoundRecord> open_;
};

inline constexpr int kMemorySchemaVersion = 1;

json event_to_json(const ToolEvent& e, bool inline_images);
ToolEvent event_from_json(const json& j);
json round_to_json(const RoundRecord& r, bool inline_images);
RoundRecord round_from_json(const json& j);

} // namespace sceneloop::memory
