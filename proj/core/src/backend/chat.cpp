#include "sceneloop/backend/chat.hpp"

#include "sceneloop/util/base64.hpp"

namespace sceneloop::backend {

std::string_view to_string(Role role) {
    switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    case Role::tool: return "tool";
    }
    return "user";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    if (s == "tool") return Role::tool;
    throw Error("unknown chat role '" + std::string(s) + "'");
}

std::string_view to_string(Stream s) {
    switch (s) {
    case Stream::generator: return "generator";
    case Stream::verifier: return "verifier";
    case Stream::judge: return "judge";
    }
    return "generator";
}

std::string ChatMessage::text() const {
    std::string out;
    for (const auto& p : parts) {
        if (p.kind != ContentPart::Kind::text) continue;
        if (!out.empty()) out += '\n';
        out += p.text;
    }
    return out;
}

std::size_t ChatMessage::image_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.kind == ContentPart::Kind::image;
    return n;
}

ChatMessage& ChatMessage::add_text(std::string t) {
    parts.push_back({ContentPart::Kind::text, std::move(t), {}});
    return *this;
}

ChatMessage& ChatMessage::add_image(scene::Image img) {
    parts.push_back({ContentPart::Kind::image, {}, std::move(img)});
    return *this;
}

ChatMessage ChatMessage::system(std::string t) {
    ChatMessage m;
    m.role = Role::system;
    m.add_text(std::move(t));
    return m;
}

ChatMessage ChatMessage::user(std::string t) {
    ChatMessage m;
    m.role = Role::user;
    m.add_text(std::move(t));
    return m;
}

ChatMessage ChatMessage::assistant(std::string t) {
    ChatMessage m;
    m.role = Role::assistant;
    if (!t.empty()) m.add_text(std::move(t));
    return m;
}

std::size_t count_images(const std::vector<ChatMessage>& messages) {
    std::size_t n = 0;
    for (const auto& m : messages) n += m.image_count();
    return n;
}

std::size_t estimate_tokens(const std::vector<ChatMessage>& messages) {
    std::size_t chars = 0, images = 0;
    for (const auto& m : messages) {
        for (const auto& p : m.parts) {
            if (p.kind == ContentPart::Kind::text) chars += p.text.size();
            else ++images;
        }
        for (const auto& c : m.tool_calls) chars += c.name.size() + c.arguments.size();
    }
    return (chars + 3) / 4 + images * kTokensPerImage;
}

json to_json(const ChatMessage& message, bool inline_images) {
    json parts = json::array();
    for (const auto& p : message.parts) {
        if (p.kind == ContentPart::Kind::text) {
            parts.push_back({{"type", "text"}, {"text", p.text}});
        } else if (inline_images) {
            parts.push_back({{"type", "image"}, {"png", base64::encode(scene::encode_png(p.image))}});
        } else {
            parts.push_back({{"type", "image"}, {"width", p.image.width()}, {"height", p.image.height()}});
        }
    }
    json j = {{"role", to_string(message.role)}, {"content", std::move(parts)}};
    if (!message.tool_calls.empty()) {
        json calls = json::array();
        for (const auto& c : message.tool_calls)
            calls.push_back({{"id", c.id}, {"name", c.name}, {"arguments", c.arguments}});
        j["tool_calls"] = std::move(calls);
    }
    if (!message.tool_call_id.empty()) j["tool_call_id"] = message.tool_call_id;
    if (!message.name.empty()) j["name"] = message.name;
    return j;
}

} // namespace sceneloop::backend
