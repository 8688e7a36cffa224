#include <doctest.h>

#include "sceneloop/backend/embedder.hpp"
#include "sceneloop/backend/lenient.hpp"
#include "sceneloop/backend/openai.hpp"
#include "sceneloop/backend/replay.hpp"
#include "sceneloop/tools/registry.hpp"
#include "support.hpp"

#include <httplib.h>

#include <deque>
#include <random>
#include <thread>

using namespace sceneloop;
using namespace sceneloop::backend;

namespace {

struct FakeTransport final : HttpTransport {
    std::deque<HttpResponse> replies;
    int transport_failures = 0;  // thrown before the queued replies
    std::vector<HttpRequest> seen;

    HttpResponse post(const HttpRequest& r) override {
        seen.push_back(r);
        if (transport_failures > 0) {
            --transport_failures;
            throw TransportError("connection reset");
        }
        REQUIRE_FALSE(replies.empty());
        auto out = replies.front();
        replies.pop_front();
        return out;
    }
};

std::string reply_with_call(const std::string& name, const json& args, const std::string& content = "") {
    json msg = {{"role", "assistant"}, {"content", content}};
    msg["tool_calls"] = json::array(
        {{{"id", "c1"}, {"type", "function"}, {"function", {{"name", name}, {"arguments", args.dump()}}}}});
    return json{{"choices", json::array({{{"message", msg}}})}}.dump();
}

std::string reply_text(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

BackendProfile profile() {
    BackendProfile p;
    p.endpoint = "http://model.invalid/v1";
    p.model = "m";
    p.api_key = "sk-secret-123456";
    p.retry.base = std::chrono::milliseconds(1);
    return p;
}

ChatRequest simple_request(tools::Phase ph = tools::Phase::generation) {
    ChatRequest r;
    r.messages.push_back(ChatMessage::system("sys"));
    r.messages.push_back(ChatMessage::user("hello"));
    r.tools = tools::phase_schemas(ph);
    return r;
}

} // namespace

TEST_CASE("native tool calls are parsed from the reply") {
    auto t = std::make_shared<FakeTransport>();
    t->replies.push_back({200, reply_with_call("make_plan", {{"overall_description", "a"}, {"detailed_plan", "b"}})});
    OpenAIBackend b(profile(), t);
    auto m = b.chat(simple_request());
    REQUIRE(m.tool_calls.size() == 1);
    CHECK(m.tool_calls[0].name == "make_plan");
    CHECK(json::parse(m.tool_calls[0].arguments)["detailed_plan"] == "b");
    const json body = json::parse(t->seen[0].body);
    CHECK(body["model"] == "m");
    CHECK(body["tools"].size() == 5);
    CHECK(t->seen[0].url == "http://model.invalid/v1/chat/completions");
    CHECK(t->seen[0].headers.at("Authorization") == "Bearer sk-secret-123456");
}

TEST_CASE("429 then 200 is retried with backoff") {
    auto t = std::make_shared<FakeTransport>();
    t->replies.push_back({429, "{\"error\":\"slow down\"}"});
    t->replies.push_back({503, "busy"});
    t->replies.push_back({200, reply_text("hi")});
    OpenAIBackend b(profile(), t);
    std::vector<long> waits;
    b.sleep = [&](std::chrono::milliseconds d) { waits.push_back(d.count()); };
    CHECK(b.chat(simple_request()).text() == "hi");
    CHECK(t->seen.size() == 3);
    REQUIRE(waits.size() == 2);
    CHECK(waits[1] == 2 * waits[0]);
}

TEST_CASE("transport errors are retried then surfaced") {
    auto t = std::make_shared<FakeTransport>();
    t->transport_failures = 10;
    OpenAIBackend b(profile(), t);
    b.sleep = [](std::chrono::milliseconds) {};
    CHECK_THROWS_AS(b.chat(simple_request()), TransportError);
    CHECK(t->seen.size() == 4);  // first try + 3 retries
}

TEST_CASE("auth failures are not retried; other 4xx are backend errors") {
    auto t = std::make_shared<FakeTransport>();
    t->replies.push_back({401, "{\"error\":\"bad key sk-secret-123456\"}"});
    OpenAIBackend b(profile(), t);
    try {
        b.chat(simple_request());
        FAIL("expected AuthError");
    } catch (const AuthError& e) {
        CHECK(std::string(e.what()).find("sk-secret-123456") == std::string::npos);
    }
    CHECK(t->seen.size() == 1);
    t->replies.push_back({400, "bad request"});
    CHECK_THROWS_AS(b.chat(simple_request()), BackendError);
}

TEST_CASE("image cap is checked before sending") {
    auto t = std::make_shared<FakeTransport>();
    auto p = profile();
    p.max_images = 2;
    OpenAIBackend b(p, t);
    auto r = simple_request();
    for (int i = 0; i < 3; ++i) r.messages[1].add_image(testing::solid(2, 2, 1, 2, 3));
    CHECK_THROWS_AS(b.chat(r), PreflightError);
    CHECK(t->seen.empty());
}

TEST_CASE("redaction masks the key and shortens inline images") {
    OpenAIBackend b(profile());
    const std::string s = b.redact("key=sk-secret-123456 img=data:image/png;base64," + std::string(5000, 'A') + "\" end");
    CHECK(s.find("sk-secret-123456") == std::string::npos);
    CHECK(s.size() < 200);
    CHECK(s.find("end") != std::string::npos);
}

TEST_CASE("tool-result images move into a following user message") {
    OpenAIBackend b(profile());
    ChatRequest r = simple_request();
    ChatMessage a = ChatMessage::assistant("");
    a.tool_calls.push_back({"c1", "execute_code", "{}"});
    ChatMessage tool;
    tool.role = Role::tool;
    tool.tool_call_id = "c1";
    tool.add_text("rendered");
    tool.add_image(testing::solid(2, 2, 0, 0, 0));
    r.messages.push_back(a);
    r.messages.push_back(tool);
    const json body = b.build_body(r);
    const auto& msgs = body["messages"];
    REQUIRE(msgs.size() == 5);
    CHECK(msgs[3]["role"] == "tool");
    CHECK(msgs[3]["tool_call_id"] == "c1");
    CHECK(msgs[4]["role"] == "user");
    CHECK(msgs[4].dump().find("data:image/png;base64,") != std::string::npos);
}

TEST_CASE("text mode puts tools in the prompt and recovers calls from content") {
    auto t = std::make_shared<FakeTransport>();
    t->replies.push_back({200, reply_text("I'll plan.\n```json\n{\"name\": \"make_plan\", \"arguments\": "
                                          "{\"overall_description\": \"x\", \"detailed_plan\": \"y\"}}\n```")});
    auto p = profile();
    p.native_tool_calls = false;
    OpenAIBackend b(p, t);
    auto m = b.chat(simple_request());
    REQUIRE(m.tool_calls.size() == 1);
    CHECK(m.tool_calls[0].name == "make_plan");
    const json body = json::parse(t->seen[0].body);
    CHECK_FALSE(body.contains("tools"));
    CHECK(body["messages"][0].dump().find("make_plan") != std::string::npos);
}

TEST_CASE("lenient parser variants") {
    auto c = parse_tool_call_lenient("{\"tool\": \"end_process\", \"parameters\": {}}");
    REQUIRE(c);
    CHECK(c->name == "end_process");
    c = parse_tool_call_lenient("Thinking {not json} then {\"name\":\"x\",\"arguments\":\"{\\\"a\\\":1}\"} done");
    REQUIRE(c);
    CHECK(c->arguments["a"] == 1);
    CHECK(c->reasoning.find("Thinking") != std::string::npos);
    c = parse_tool_call_lenient("{\"name\":\"x\",\"arguments\":{\"s\":\"brace } in string\"}}");
    REQUIRE(c);
    CHECK(c->arguments["s"] == "brace } in string");
    CHECK_FALSE(parse_tool_call_lenient("no calls here"));
    CHECK_FALSE(parse_tool_call_lenient("{\"name\": 3, \"arguments\": {}}"));
}

TEST_CASE("lenient parser never throws on random input") {
    std::mt19937 rng(5);
    const std::string alphabet = "{}[]\":,\\ abnmetrsu0123456789\n`";
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1), len(0, 200);
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        const size_t n = len(rng);
        for (size_t k = 0; k < n; ++k) s += alphabet[pick(rng)];
        if (i % 3 == 0) s += "{\"name\":\"t\",\"arguments\":{}}";
        CHECK_NOTHROW(parse_tool_call_lenient(s));
    }
}

TEST_CASE("replay backend serves scripted turns per stream and then runs out") {
    const json script = {{"version", 1},
                         {"generator", {{{"content", "g1"}, {"tool_name", "end_process"}, {"arguments", json::object()}}}},
                         {"verifier", {{{"content", "v1"}}}}};
    ReplayBackend b(ReplayScript::from_json(script));
    ChatRequest r;
    r.stream = Stream::verifier;
    CHECK(b.chat(r).text() == "v1");
    r.stream = Stream::generator;
    auto m = b.chat(r);
    CHECK(m.tool_calls.at(0).name == "end_process");
    CHECK(m.tool_calls.at(0).arguments == "{}");
    CHECK_THROWS_AS(b.chat(r), ScriptExhausted);
    CHECK_THROWS_AS(ReplayScript::from_json({{"version", 2}, {"turns", json::array()}}), sceneloop::Error);
}

TEST_CASE("replay arguments given as a string are passed verbatim") {
    const json script = {{"version", 1},
                         {"turns", {{{"tool_name", "investigate"}, {"arguments", "{\"operation\": \"zoom\",}"}}}}};
    ReplayBackend b(ReplayScript::from_json(script));
    CHECK(b.chat(ChatRequest{}).tool_calls.at(0).arguments == "{\"operation\": \"zoom\",}");
}

TEST_CASE("curl transport against a local server") {
    httplib::Server server;
    std::string seen_auth;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        res.set_content(reply_with_call("get_scene_info", json::object(), "looking"), "application/json");
    });
    server.Post("/v1/embeddings", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"data":[{"embedding":[3,4]}]})", "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    auto p = profile();
    p.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    OpenAIBackend b(p, std::make_shared<CurlTransport>());
    auto m = b.chat(simple_request());
    CHECK(m.tool_calls.at(0).name == "get_scene_info");
    CHECK(m.text() == "looking");
    CHECK(seen_auth == "Bearer sk-secret-123456");
    HttpEmbedder e(p.endpoint + "/embeddings", "clip", "k", std::make_shared<CurlTransport>());
    auto v = e.embed(testing::solid(2, 2, 0, 0, 0));
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx(0.6));
    server.stop();
    th.join();
    p.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    OpenAIBackend dead(p, std::make_shared<CurlTransport>());
    dead.sleep = [](std::chrono::milliseconds) {};
    CHECK_THROWS_AS(dead.chat(simple_request()), TransportError);
}
