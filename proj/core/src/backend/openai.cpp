#include "sceneloop/backend/openai.hpp"

#include "sceneloop/backend/lenient.hpp"
#include "sceneloop/util/base64.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cstdlib>
#include <cmath>
#include <thread>

namespace sceneloop::backend {

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : std::move(fallback);
}

std::string data_url(const scene::Image& img) {
    return "data:image/png;base64," + base64::encode(scene::encode_png(img));
}

json content_json(const ChatMessage& m) {
    json parts = json::array();
    for (const auto& p : m.parts) {
        if (p.kind == ContentPart::Kind::text) parts.push_back({{"type", "text"}, {"text", p.text}});
        else parts.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url(p.image)}}}});
    }
    return parts;
}

std::string tools_prompt(const json& tools) {
    std::string s = "\n\n[Tools]\nReply with one JSON object {\"name\": <tool name>, \"arguments\": {...}} for the "
                    "tool you call, alongside your reasoning. Available tools:\n";
    for (const auto& t : tools) s += t.at("function").dump() + "\n";
    return s;
}

} // namespace

BackendProfile BackendProfile::from_env() {
    BackendProfile p;
    p.endpoint = env_or("SCENELOOP_ENDPOINT", "https://api.openai.com/v1");
    p.api_key = env_or("SCENELOOP_API_KEY", "");
    p.model = env_or("SCENELOOP_MODEL", "gpt-4o");
    return p;
}

OpenAIBackend::OpenAIBackend(BackendProfile profile, std::shared_ptr<HttpTransport> transport, LogSink log)
    : profile_(std::move(profile)), transport_(std::move(transport)), log_(std::move(log)) {
    if (profile_.timeout.count() <= 0) throw Error("backend timeout must be positive");
    if (profile_.retry.retries < 0) throw Error("backend retries must be non-negative");
    if (!transport_) transport_ = std::make_shared<CurlTransport>();
    sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

json OpenAIBackend::build_body(const ChatRequest& request) const {
    json messages = json::array();
    const bool native = profile_.native_tool_calls;
    bool tools_injected = false;
    for (const ChatMessage& m : request.messages) {
        switch (m.role) {
        case Role::system: {
            std::string text = m.text();
            if (!native && !tools_injected && !request.tools.empty()) {
                text += tools_prompt(request.tools);
                tools_injected = true;
            }
            messages.push_back({{"role", "system"}, {"content", text}});
            break;
        }
        case Role::user: messages.push_back({{"role", "user"}, {"content", content_json(m)}}); break;
        case Role::assistant: {
            json a = {{"role", "assistant"}};
            std::string text = m.text();
            if (native) {
                a["content"] = text.empty() ? json(nullptr) : json(text);
                if (!m.tool_calls.empty()) {
                    json calls = json::array();
                    for (const auto& c : m.tool_calls)
                        calls.push_back({{"id", c.id},
                                         {"type", "function"},
                                         {"function", {{"name", c.name}, {"arguments", c.arguments}}}});
                    a["tool_calls"] = std::move(calls);
                }
            } else {
                for (const auto& c : m.tool_calls)
                    text += (text.empty() ? "" : "\n") +
                            fmt::format("{{\"name\": \"{}\", \"arguments\": {}}}", c.name, c.arguments);
                a["content"] = text;
            }
            messages.push_back(std::move(a));
            break;
        }
        case Role::tool: {
            // Tool messages carry text only; images follow as a user turn.
            if (native) {
                messages.push_back({{"role", "tool"}, {"tool_call_id", m.tool_call_id}, {"content", m.text()}});
            } else {
                messages.push_back({{"role", "user"}, {"content", fmt::format("[{} result]\n{}", m.name, m.text())}});
            }
            if (m.image_count() > 0) {
                ChatMessage images;
                images.add_text(fmt::format("Images returned by {}:", m.name.empty() ? "the tool" : m.name));
                for (const auto& p : m.parts)
                    if (p.kind == ContentPart::Kind::image) images.add_image(p.image);
                messages.push_back({{"role", "user"}, {"content", content_json(images)}});
            }
            break;
        }
        }
    }
    if (!native && !tools_injected && !request.tools.empty())
        messages.insert(messages.begin(), json{{"role", "system"}, {"content", tools_prompt(request.tools)}});

    json body = {{"model", profile_.model}, {"messages", std::move(messages)}};
    if (native && !request.tools.empty()) {
        body["tools"] = request.tools;
        body["tool_choice"] = "auto";
    }
    if (profile_.temperature) body["temperature"] = *profile_.temperature;
    if (profile_.seed) body["seed"] = *profile_.seed;
    return body;
}

ChatMessage OpenAIBackend::parse_reply(const json& body) const {
    const json* msg = nullptr;
    if (body.contains("choices") && body["choices"].is_array() && !body["choices"].empty())
        msg = &body["choices"][0]["message"];
    if (!msg || !msg->is_object()) throw BackendError("response has no choices[0].message");

    ChatMessage out;
    out.role = Role::assistant;
    std::string content;
    if (msg->contains("content") && (*msg)["content"].is_string()) content = (*msg)["content"].get<std::string>();

    if (profile_.native_tool_calls) {
        if (!content.empty()) out.add_text(content);
        if (msg->contains("tool_calls") && (*msg)["tool_calls"].is_array()) {
            for (const auto& c : (*msg)["tool_calls"]) {
                const json& f = c.at("function");
                const json& args = f.value("arguments", json("{}"));
                out.tool_calls.push_back({c.value("id", ""), f.at("name").get<std::string>(),
                                          args.is_string() ? args.get<std::string>() : args.dump()});
            }
        }
        return out;
    }
    if (auto call = parse_tool_call_lenient(content)) {
        if (!call->reasoning.empty()) out.add_text(call->reasoning);
        out.tool_calls.push_back({"call_0", call->name, call->arguments.dump()});
    } else if (!content.empty()) {
        out.add_text(content);
    }
    return out;
}

std::string OpenAIBackend::redact(std::string s) const {
    if (!profile_.api_key.empty()) {
        for (std::size_t pos = s.find(profile_.api_key); pos != std::string::npos;
             pos = s.find(profile_.api_key, pos + 3))
            s.replace(pos, profile_.api_key.size(), "***");
    }
    static constexpr std::string_view marker = "data:image/png;base64,";
    std::string out;
    std::size_t i = 0;
    for (std::size_t pos = s.find(marker); pos != std::string::npos; pos = s.find(marker, i)) {
        out.append(s, i, pos + marker.size() - i);
        std::size_t j = pos + marker.size();
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '+' || s[j] == '/' || s[j] == '='))
            ++j;
        out += fmt::format("<{} chars>", j - pos - marker.size());
        i = j;
    }
    out.append(s, i, std::string::npos);
    return out;
}

ChatMessage OpenAIBackend::chat(const ChatRequest& request) {
    if (request.messages.empty()) throw BackendError("chat request has no messages");
    const std::size_t images = count_images(request.messages);
    if (images > profile_.max_images)
        throw PreflightError(fmt::format("request carries {} images; the profile allows {}", images, profile_.max_images));

    HttpRequest http;
    http.url = profile_.endpoint;
    if (http.url.find("/chat/completions") == std::string::npos)
        http.url += (http.url.empty() || http.url.back() != '/' ? "/" : "") + std::string("chat/completions");
    http.headers["Content-Type"] = "application/json";
    if (!profile_.api_key.empty()) http.headers["Authorization"] = "Bearer " + profile_.api_key;
    http.body = build_body(request).dump();
    http.timeout = profile_.timeout;
    if (log_) log_(redact("request " + http.url + " " + http.body));

    std::string last_error;
    bool last_was_transport = false;
    for (int attempt = 0; attempt <= profile_.retry.retries; ++attempt) {
        if (attempt > 0) {
            const double scale = std::pow(profile_.retry.factor, attempt - 1);
            sleep(std::chrono::milliseconds(static_cast<long long>(profile_.retry.base.count() * scale)));
        }
        HttpResponse resp;
        try {
            resp = transport_->post(http);
        } catch (const TransportError& e) {
            last_error = e.what();
            last_was_transport = true;
            if (log_) log_(redact(fmt::format("attempt {} failed: {}", attempt + 1, last_error)));
            continue;
        }
        if (log_) log_(redact(fmt::format("response {} {}", resp.status, resp.body)));
        if (resp.status == 401 || resp.status == 403)
            throw AuthError(fmt::format("endpoint rejected the credential (HTTP {})", resp.status));
        if (resp.status == 429 || resp.status >= 500) {
            last_error = fmt::format("HTTP {}", resp.status);
            last_was_transport = false;
            continue;
        }
        if (resp.status < 200 || resp.status >= 300)
            throw BackendError(redact(fmt::format("HTTP {}: {}", resp.status, resp.body.substr(0, 500))));
        json body = json::parse(resp.body, nullptr, false);
        if (body.is_discarded()) throw BackendError("response body is not JSON");
        return parse_reply(body);
    }
    const std::string msg = fmt::format("giving up after {} attempts: {}", profile_.retry.retries + 1, last_error);
    if (last_was_transport) throw TransportError(msg);
    throw BackendError(msg);
}

} // namespace sceneloop::backend
