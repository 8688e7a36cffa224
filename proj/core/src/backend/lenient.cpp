#include "sceneloop/backend/lenient.hpp"

#include "sceneloop/util/text.hpp"

#include <cctype>

namespace sceneloop::backend {

using nlohmann::json;

namespace {

// End of the balanced object starting at `open`, or npos.
std::size_t balanced_end(std::string_view s, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
}

const json* field(const json& j, const char* a, const char* b) {
    if (auto it = j.find(a); it != j.end()) return &*it;
    if (auto it = j.find(b); it != j.end()) return &*it;
    return nullptr;
}

std::optional<json> arguments_of(const json& j) {
    const json* args = field(j, "arguments", "parameters");
    if (!args) return std::nullopt;
    if (args->is_object()) return std::optional<json>(std::in_place, *args);
    // Some models double-encode the arguments as a string.
    if (args->is_string()) {
        json inner = json::parse(args->get<std::string>(), nullptr, false);
        if (!inner.is_discarded() && inner.is_object()) return std::optional<json>(std::in_place, std::move(inner));
    }
    return std::nullopt;
}

bool is_call(const json& j) {
    if (!j.is_object()) return false;
    const json* name = field(j, "name", "tool");
    return name && name->is_string() && arguments_of(j).has_value();
}

std::string strip_fences(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s.compare(i, 3, "```") == 0) {
            i += 3;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            continue;
        }
        out += s[i++];
    }
    return out;
}

} // namespace

std::optional<JsonSpan> find_json_object(std::string_view text, bool (*accept)(const json&)) {
    for (std::size_t i = text.find('{'); i != std::string_view::npos; i = text.find('{', i + 1)) {
        const std::size_t end = balanced_end(text, i);
        if (end == std::string_view::npos) continue;
        json j = json::parse(text.substr(i, end - i), nullptr, false);
        if (j.is_discarded() || !accept(j)) continue;
        return JsonSpan{std::move(j), i, end};
    }
    return std::nullopt;
}

std::optional<LenientCall> parse_tool_call_lenient(std::string_view text) {
    auto span = find_json_object(text, &is_call);
    if (!span) return std::nullopt;
    LenientCall call;
    call.name = field(span->value, "name", "tool")->get<std::string>();
    call.arguments = *arguments_of(span->value);
    const std::string before = strip_fences(text.substr(0, span->begin));
    const std::string after = strip_fences(text.substr(span->end));
    const auto b = text::trim(before), a = text::trim(after);
    call.reasoning = std::string(b);
    if (!a.empty()) call.reasoning += (b.empty() ? "" : "\n") + std::string(a);
    return call;
}

} // namespace sceneloop::backend
