#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace sceneloop::backend {

struct LenientCall {
    std::string name;
    nlohmann::json arguments;
    std::string reasoning;  // text outside the object, fences removed
};

// Finds the first balanced JSON object with a string "name" (or "tool") and an
// object "arguments" (or "parameters"). nullopt when there is none.
std::optional<LenientCall> parse_tool_call_lenient(std::string_view text);

// The first balanced JSON object in `text` satisfying `accept`, with its span.
struct JsonSpan {
    nlohmann::json value;
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the closing brace
};
std::optional<JsonSpan> find_json_object(std::string_view text, bool (*accept)(const nlohmann::json&));

} // namespace sceneloop::backend
