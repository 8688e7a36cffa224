#pragma once

#include "sceneloop/util/error.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sceneloop::tools {

using nlohmann::json;

enum class Phase { generation, verification };

std::string_view to_string(Phase phase);
Phase phase_from_string(std::string_view s);

struct ParamSpec {
    std::string name;
    std::string type;  // string | number | integer | boolean | array
    std::string description;
    std::vector<std::string> enum_values;
    // For arrays.
    std::string item_type;
    std::string item_description;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    std::vector<std::string> required;

    const ParamSpec* find(std::string_view param) const;
    // OpenAI function-calling shape: {"type":"function","function":{...}}.
    json to_json() const;
};

// Immutable, process-wide registry.
const std::vector<ToolSpec>& tool_specs(Phase phase);
const ToolSpec* find_tool(Phase phase, std::string_view name);

// {"generation": [...], "verification": [...]}
json export_schemas();
// Function specs for one phase, optionally restricted to the named tools.
json phase_schemas(Phase phase, const std::vector<std::string>& only = {});

} // namespace sceneloop::tools
