#include "sceneloop/backend/replay.hpp"

#include <fmt/format.h>

#include <fstream>

namespace sceneloop::backend {

namespace {

std::string raw_arguments(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_null()) return "{}";
    return j.dump();
}

ReplayTurn parse_turn(const json& t) {
    ReplayTurn turn;
    turn.content = t.value("content", "");
    if (t.contains("tool_calls")) {
        for (const auto& c : t.at("tool_calls"))
            turn.calls.push_back({"", c.at("name").get<std::string>(), raw_arguments(c.value("arguments", json()))});
    } else if (t.contains("tool_name") && !t.at("tool_name").is_null()) {
        turn.calls.push_back({"", t.at("tool_name").get<std::string>(), raw_arguments(t.value("arguments", json()))});
    }
    return turn;
}

std::vector<ReplayTurn> parse_turns(const json& arr) {
    if (!arr.is_array()) throw Error("replay turns must be an array");
    std::vector<ReplayTurn> out;
    for (const auto& t : arr) out.push_back(parse_turn(t));
    return out;
}

} // namespace

ReplayScript ReplayScript::from_json(const json& j) {
    if (j.value("version", 0) != 1) throw Error("replay script must declare \"version\": 1");
    auto parse_episode = [](const json& e) {
        Episode ep;
        ep.repeat = e.value("repeat", false);
        if (e.contains("turns")) ep.shared = parse_turns(e.at("turns"));
        for (auto [key, stream] : {std::pair{"generator", Stream::generator}, {"verifier", Stream::verifier},
                                   {"judge", Stream::judge}}) {
            if (e.contains(key)) {
                ep.streams[stream] = parse_turns(e.at(key));
                ep.split = true;
            }
        }
        return ep;
    };
    ReplayScript s;
    if (j.contains("episodes")) {
        for (const auto& e : j.at("episodes")) s.episodes_.push_back(parse_episode(e));
        if (s.episodes_.empty()) throw Error("replay script has an empty \"episodes\" list");
    } else {
        s.episodes_.push_back(parse_episode(j));
    }
    return s;
}

ReplayScript ReplayScript::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open replay script " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error("replay script " + path.string() + " is not valid JSON");
    return from_json(j);
}

const std::vector<ReplayTurn>& ReplayScript::turns(std::size_t episode, Stream s) const {
    static const std::vector<ReplayTurn> none;
    const Episode& ep = episodes_.at(episode % episodes_.size());
    if (!ep.split) return ep.shared;
    auto it = ep.streams.find(s);
    return it == ep.streams.end() ? none : it->second;
}

bool ReplayScript::repeats(std::size_t episode) const { return episodes_.at(episode % episodes_.size()).repeat; }

ReplayBackend::ReplayBackend(ReplayScript script, std::size_t episode) : script_(std::move(script)), episode_(episode) {}

ChatMessage ReplayBackend::chat(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    if (keep_requests) requests_.push_back(request);
    const auto& turns = script_.turns(episode_, request.stream);
    // A single-stream script is consumed by every caller in arrival order.
    std::size_t& cursor = shared_cursor_[&turns];
    if (cursor >= turns.size() && script_.repeats(episode_) && !turns.empty()) cursor = 0;
    if (cursor >= turns.size())
        throw ScriptExhausted(fmt::format("replay script has no {} turn left (after {} turns)",
                                          to_string(request.stream), turns.size()));
    const ReplayTurn& t = turns[cursor++];
    ChatMessage m = ChatMessage::assistant(t.content);
    for (const auto& c : t.calls) {
        ToolCallRequest call = c;
        call.id = fmt::format("call_{}", calls_++);
        m.tool_calls.push_back(std::move(call));
    }
    return m;
}

} // namespace sceneloop::backend
