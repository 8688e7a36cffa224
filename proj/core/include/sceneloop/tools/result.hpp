#pragma once

#include "sceneloop/scene/image.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sceneloop::tools {

enum class Control { proceed, end_generation, end_verification };

std::string_view to_string(Control c);

// The verifier's round summary (visual_difference + edit_suggestion).
struct Feedback {
    std::string visual_difference;
    std::string edit_suggestion;
    bool operator==(const Feedback&) const = default;
};

struct Plan {
    std::string overall_description;
    std::string detailed_plan;
    bool operator==(const Plan&) const = default;
};

struct ToolResult {
    std::string text;
    std::vector<scene::Image> images;
    Control control = Control::proceed;
    // In-band failure (schema, lookup, execution); the episode continues.
    bool error = false;
    std::optional<Feedback> feedback;  // set for verifier end_process

    static ToolResult failure(std::string text) {
        ToolResult r;
        r.text = std::move(text);
        r.error = true;
        return r;
    }
};

} // namespace sceneloop::tools
