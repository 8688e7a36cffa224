#pragma once

#include "sceneloop/backend/chat.hpp"

#include <filesystem>
#include <map>
#include <mutex>

namespace sceneloop::backend {

// One scripted assistant turn.
struct ReplayTurn {
    std::string content;
    std::vector<ToolCallRequest> calls;
};

// Version 1 script:
//   {"version": 1, "turns": [...]}                        one stream, any caller
//   {"version": 1, "generator": [...], "verifier": [...]}  per-stream turns
//   {"version": 1, "episodes": [{...}, ...]}              per-episode scripts
// A turn is {"content", "tool_name", "arguments"} or {"content", "tool_calls":
// [{"name", "arguments"}, ...]}. Arguments are passed through unmodified: a
// JSON string is used verbatim as the wire text, anything else is dumped.
// "repeat": true makes every stream of that script cycle instead of running
// out (a model that never finishes).
class ReplayScript {
public:
    static ReplayScript from_json(const json& j);
    static ReplayScript load(const std::filesystem::path& path);

    std::size_t episode_count() const { return episodes_.size(); }
    // Turns for stream `s` of episode `k mod episode_count()`.
    const std::vector<ReplayTurn>& turns(std::size_t episode, Stream s) const;
    bool repeats(std::size_t episode) const;

private:
    struct Episode {
        std::vector<ReplayTurn> shared;  // "turns"
        std::map<Stream, std::vector<ReplayTurn>> streams;
        bool split = false;
        bool repeat = false;
    };
    std::vector<Episode> episodes_;
};

class ReplayBackend final : public Backend {
public:
    ReplayBackend(ReplayScript script, std::size_t episode = 0);

    ChatMessage chat(const ChatRequest& request) override;
    // Every request received, in order (for assertions and logs).
    const std::vector<ChatRequest>& requests() const { return requests_; }
    bool keep_requests = false;

private:
    ReplayScript script_;
    std::size_t episode_;
    std::map<const std::vector<ReplayTurn>*, std::size_t> shared_cursor_;
    std::vector<ChatRequest> requests_;
    std::mutex mutex_;
    std::size_t calls_ = 0;
};

} // namespace sceneloop::backend
