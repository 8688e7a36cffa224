#pragma once

#include "sceneloop/backend/http.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace sceneloop::backend {

struct RetryPolicy {
    int retries = 3;
    std::chrono::milliseconds base{1000};
    double factor = 2.0;
};

struct BackendProfile {
    std::string endpoint;  // base URL; "/chat/completions" is appended unless present
    std::string model;
    std::string api_key;
    // false: tool specs go into the system prompt and calls are recovered
    // from the reply text with parse_tool_call_lenient.
    bool native_tool_calls = true;
    std::size_t max_images = 16;
    std::chrono::milliseconds timeout{120000};
    RetryPolicy retry;
    std::optional<double> temperature;
    std::optional<std::int64_t> seed;

    // SCENELOOP_ENDPOINT, SCENELOOP_API_KEY, SCENELOOP_MODEL.
    static BackendProfile from_env();
};

using LogSink = std::function<void(const std::string&)>;

// One "chat/completions" dialect for every provider.
class OpenAIBackend final : public Backend {
public:
    OpenAIBackend(BackendProfile profile, std::shared_ptr<HttpTransport> transport = nullptr, LogSink log = nullptr);

    ChatMessage chat(const ChatRequest& request) override;

    json build_body(const ChatRequest& request) const;
    ChatMessage parse_reply(const json& body) const;
    // Copy of `s` with the credential masked and inline images shortened.
    std::string redact(std::string s) const;

    // Injected in tests to skip real sleeping.
    std::function<void(std::chrono::milliseconds)> sleep;

private:
    BackendProfile profile_;
    std::shared_ptr<HttpTransport> transport_;
    LogSink log_;
};

} // namespace sceneloop::backend
