#include "sceneloop/tools/validate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace sceneloop::tools {

SchemaError::SchemaError(std::string tool, std::string field, std::string constraint)
    : Error(field.empty() ? fmt::format("invalid call to '{}': {}", tool, constraint)
                          : fmt::format("invalid call to '{}': field '{}' {}", tool, field, constraint)),
      tool_(std::move(tool)),
      field_(std::move(field)),
      constraint_(std::move(constraint)) {}

namespace {

bool is_integral(const json& v) {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && std::floor(d) == d;
}

bool matches_type(const json& v, const std::string& type) {
    if (type == "string") return v.is_string();
    if (type == "number") return v.is_number();
    if (type == "integer") return is_integral(v);
    if (type == "boolean") return v.is_boolean();
    if (type == "array") return v.is_array();
    return false;
}

void check_param(const ToolSpec& spec, const ParamSpec& p, const json& v) {
    if (!matches_type(v, p.type)) throw SchemaError(spec.name, p.name, "must be of type " + p.type);
    if (p.type == "number" && !std::isfinite(v.get<double>())) throw SchemaError(spec.name, p.name, "must be finite");
    if (!p.enum_values.empty()) {
        const auto& s = v.get_ref<const std::string&>();
        if (std::find(p.enum_values.begin(), p.enum_values.end(), s) == p.enum_values.end()) {
            std::string allowed;
            for (const auto& e : p.enum_values) allowed += (allowed.empty() ? "" : ", ") + e;
            throw SchemaError(spec.name, p.name, fmt::format("must be one of [{}], got \"{}\"", allowed, s));
        }
    }
    if (p.type == "array") {
        for (const json& item : v) {
            if (!matches_type(item, p.item_type))
                throw SchemaError(spec.name, p.name, "items must be of type " + p.item_type);
            if (p.item_type == "number" && !std::isfinite(item.get<double>()))
                throw SchemaError(spec.name, p.name, "items must be finite");
        }
    }
}

bool has_nonempty_string(const json& args, const char* key) {
    auto it = args.find(key);
    return it != args.end() && it->is_string() && !it->get_ref<const std::string&>().empty();
}

// Constraints the JSON schemas cannot express.
void check_conditionals(const ToolSpec& spec, const json& args) {
    const std::string& n = spec.name;
    if (n == "get_better_object") {
        if (args.value("reference_type", "") == "text" && !has_nonempty_string(args, "object_description"))
            throw SchemaError(n, "object_description", "is required when reference_type is \"text\"");
        if (args.value("rig_and_animate", false) && !has_nonempty_string(args, "action_description"))
            throw SchemaError(n, "action_description", "is required when rig_and_animate is true");
    } else if (n == "investigate") {
        const std::string op = args.at("operation").get<std::string>();
        if (op == "zoom" || op == "move") {
            if (!args.contains("direction")) throw SchemaError(n, "direction", "is required for " + op);
            const std::string dir = args.at("direction").get<std::string>();
            if (op == "zoom" && dir != "in" && dir != "out")
                throw SchemaError(n, "direction", "must be \"in\" or \"out\" for zoom");
        } else if (op == "focus") {
            if (!has_nonempty_string(args, "object_name")) throw SchemaError(n, "object_name", "is required for focus");
        }
    } else if (n == "set_camera") {
        for (const char* key : {"location", "rotation_euler"})
            if (args.at(key).size() != 3) throw SchemaError(n, key, "must have exactly 3 elements");
    } else if (n == "set_keyframe") {
        if (args.at("frame_number").get<double>() < 0) throw SchemaError(n, "frame_number", "must be >= 0");
    }
}

} // namespace

ToolCall validate_tool_call(Phase phase, std::string_view name, const json& raw_arguments) {
    const ToolSpec* spec = find_tool(phase, name);
    if (!spec) {
        const Phase other = phase == Phase::generation ? Phase::verification : Phase::generation;
        if (find_tool(other, name))
            throw SchemaError(std::string(name), "",
                              fmt::format("is a {} tool and cannot be used during {}", to_string(other),
                                          to_string(phase)));
        throw SchemaError(std::string(name), "", "unknown tool");
    }

    json args;
    if (raw_arguments.is_string()) {
        const auto& text = raw_arguments.get_ref<const std::string&>();
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
            args = json::object();
        } else {
            args = json::parse(text, nullptr, false);
            if (args.is_discarded()) throw SchemaError(spec->name, "", "arguments are not valid JSON");
        }
    } else if (raw_arguments.is_null()) {
        args = json::object();
    } else {
        args = raw_arguments;
    }
    if (!args.is_object()) throw SchemaError(spec->name, "", "arguments must be a JSON object");

    for (const auto& [key, value] : args.items()) {
        const ParamSpec* p = spec->find(key);
        if (!p) throw SchemaError(spec->name, key, "is not a parameter of this tool");
        check_param(*spec, *p, value);
    }
    for (const std::string& req : spec->required)
        if (!args.contains(req)) throw SchemaError(spec->name, req, "is required");
    check_conditionals(*spec, args);

    ToolCall call;
    call.name = spec->name;
    call.arguments = std::move(args);
    return call;
}

} // namespace sceneloop::tools
