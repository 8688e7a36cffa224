#pragma once

#include "sceneloop/tools/registry.hpp"

namespace sceneloop::tools {

// Rejected tool call. what() is the text handed back to the model.
class SchemaError : public Error {
public:
    SchemaError(std::string tool, std::string field, std::string constraint);
    const std::string& tool() const { return tool_; }
    const std::string& field() const { return field_; }
    const std::string& constraint() const { return constraint_; }

private:
    std::string tool_;
    std::string field_;
    std::string constraint_;
};

struct ToolCall {
    std::string id;
    std::string name;
    json arguments = json::object();
    std::string reasoning;
};

// `raw_arguments` is either a JSON object or a string holding one (the wire
// form from function-calling backends).
ToolCall validate_tool_call(Phase phase, std::string_view name, const json& raw_arguments);

} // namespace sceneloop::tools
