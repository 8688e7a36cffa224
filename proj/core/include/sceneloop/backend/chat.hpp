#pragma once

#include "sceneloop/scene/image.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace sceneloop::backend {

using nlohmann::json;

enum class Role { system, user, assistant, tool };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct ContentPart {
    enum class Kind { text, image };
    Kind kind = Kind::text;
    std::string text;
    scene::Image image;
};

struct ToolCallRequest {
    std::string id;
    std::string name;
    // Raw JSON text as produced by the model; validation happens in the toolkit.
    std::string arguments;
};

struct ChatMessage {
    Role role = Role::user;
    std::vector<ContentPart> parts;
    std::vector<ToolCallRequest> tool_calls;  // assistant only
    std::string tool_call_id;                 // tool only
    std::string name;                         // tool only: which tool answered

    std::string text() const;  // text parts joined with '\n'
    std::size_t image_count() const;

    ChatMessage& add_text(std::string t);
    ChatMessage& add_image(scene::Image img);

    static ChatMessage system(std::string t);
    static ChatMessage user(std::string t);
    static ChatMessage assistant(std::string t);
};

std::size_t count_images(const std::vector<ChatMessage>& messages);

// Rough size model used for context budgeting: 4 characters per token and a
// flat cost per image.
inline constexpr std::size_t kTokensPerImage = 765;
std::size_t estimate_tokens(const std::vector<ChatMessage>& messages);

// Deterministic JSON form for logs and trajectories. Images are replaced by
// a size marker unless `inline_images`, in which case they become base64 PNG.
json to_json(const ChatMessage& message, bool inline_images = false);

// Which conversation a request belongs to; the replay backend keeps a
// separate script cursor per stream.
enum class Stream { generator, verifier, judge };
std::string_view to_string(Stream s);

struct ChatRequest {
    Stream stream = Stream::generator;
    std::vector<ChatMessage> messages;
    json tools = json::array();  // OpenAI function specs
};

class BackendError : public Error {
public:
    using Error::Error;
};

class AuthError : public BackendError {
public:
    using BackendError::BackendError;
};

class TransportError : public BackendError {
public:
    using BackendError::BackendError;
};

class PreflightError : public BackendError {
public:
    using BackendError::BackendError;
};

// Replay script ran out of turns.
class ScriptExhausted : public BackendError {
public:
    using BackendError::BackendError;
};

class Backend {
public:
    virtual ~Backend() = default;
    // Returns one assistant message.
    virtual ChatMessage chat(const ChatRequest& request) = 0;
};

} // namespace sceneloop::backend
