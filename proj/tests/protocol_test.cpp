#include <doctest.h>

#include "sceneloop/engine/embedded_engine.hpp"
#include "sceneloop/protocol/connection.hpp"
#include "sceneloop/protocol/server.hpp"
#include "support.hpp"

#include <sstream>
#include <thread>

using namespace sceneloop;
using namespace sceneloop::protocol;
using namespace std::chrono_literals;

namespace {

std::unique_ptr<EngineConnection> spawn_fake(const std::string& mode, ConnectionOptions o = {}) {
    return spawn_sidecar({SCENELOOP_FAKE_ENGINE, mode}, {}, std::move(o));
}

} // namespace

TEST_CASE("messages round trip through the line codec") {
    EngineRequest req{7, "execute_program", {{"source", "a\nb"}, {"language", "scn"}}};
    const std::string line = encode_message(req);
    CHECK(line.back() == '\n');
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);
    CHECK(std::get<EngineRequest>(decode_message(line)) == req);

    EngineResponse ok{7, true, {{"x", 1}}, {}};
    CHECK(std::get<EngineResponse>(decode_message(encode_message(ok))) == ok);
    EngineResponse err{8, false, json::object(), {"exec_error", "boom", "log", 3}};
    CHECK(std::get<EngineResponse>(decode_message(encode_message(err))) == err);
    CHECK(encode_message(ok) == "{\"id\":7,\"ok\":true,\"result\":{\"x\":1}}\n");
}

TEST_CASE("malformed lines are decode errors") {
    for (const char* bad : {"", "nope", "[1,2]", "{\"id\":\"x\",\"method\":\"reset\"}", "{\"id\":1}",
                            "{\"id\":1,\"ok\":true}", "{\"id\":1,\"ok\":false,\"result\":{}}",
                            "{\"id\":1,\"method\":\"reset\"}\n{\"id\":2,\"method\":\"reset\"}",
                            "{\"id\":1,\"method\":\"reset\"} trailing"})
        CHECK_THROWS_AS(decode_message(bad), DecodeError);
    std::string huge = "{\"id\":1,\"method\":\"reset\",\"params\":{\"pad\":\"";
    huge.append(65ull * 1024 * 1024, 'a');
    huge += "\"}}";
    CHECK_THROWS_AS(decode_message(huge), DecodeError);
}

TEST_CASE("serve answers every request in order and survives bad lines") {
    engine::EmbeddedEngine eng;
    std::istringstream in(
        "{\"id\":1,\"method\":\"reset\",\"params\":{}}\n"
        "garbage\n"
        "{\"id\":2,\"method\":\"execute_program\",\"params\":{\"source\":\"add_primitive name=\\\"a\\\" "
        "shape=\\\"cube\\\"\\nadd_primitive name=\\\"a\\\" shape=\\\"cube\\\"\",\"language\":\"scn\"}}\n"
        "{\"id\":3,\"method\":\"teleport\",\"params\":{}}\n"
        "{\"id\":4,\"method\":\"shutdown\",\"params\":{}}\n"
        "{\"id\":5,\"method\":\"reset\",\"params\":{}}\n");
    std::ostringstream out;
    CHECK(serve(eng, in, out) == 4);
    std::istringstream lines(out.str());
    std::vector<EngineResponse> rs;
    for (std::string l; std::getline(lines, l);) rs.push_back(std::get<EngineResponse>(decode_message(l)));
    REQUIRE(rs.size() == 5);
    CHECK(rs[0].ok);
    CHECK(rs[0].result["protocol_version"] == 1);
    CHECK(rs[1].id == -1);
    CHECK(rs[1].error.kind == "decode_error");
    CHECK(rs[2].error.kind == "exec_error");
    CHECK(rs[2].error.line == 2);
    CHECK(rs[3].error.kind == "unknown_method");
    CHECK(rs[4].id == 4);
    CHECK(rs[4].ok);
}

TEST_CASE("handle_request never throws on bad params") {
    engine::EmbeddedEngine eng;
    for (const char* m : {"render", "set_camera", "set_frame", "list_bounds", "execute_program"}) {
        auto r = handle_request(eng, EngineRequest{1, m, {{"bogus", true}, {"names", 5}, {"frame", "x"}}}, "t");
        CAPTURE(std::string(m));
        CHECK_FALSE(r.ok);
    }
    auto r = handle_request(eng, EngineRequest{1, "set_visibility", {{"show", {"x"}}, {"hide", json::array()}}}, "t");
    CHECK(r.error.kind == "not_found");
}

TEST_CASE("remote engine over a subprocess matches the embedded engine") {
    RemoteEngine remote(spawn_fake("normal"));
    engine::EmbeddedEngine local;
    CHECK(remote.connection().protocol_version() == 1);
    const auto a = remote.execute_program(testing::kBasicScene, engine::kLanguageScn);
    const auto b = local.execute_program(testing::kBasicScene, engine::kLanguageScn);
    CHECK(a.ok());
    CHECK(a.object_count == b.object_count);
    CHECK(remote.render(std::nullopt, {64, 64}) == local.render(std::nullopt, {64, 64}));
    CHECK(remote.get_scene_info() == local.get_scene_info());
    const auto fail = remote.execute_program("add_camera name=\"x\"\nbogus", engine::kLanguageScn);
    REQUIRE(fail.failure);
    CHECK(fail.failure->line == 2);
    try {
        remote.set_visibility({"nope"}, {});
        FAIL("expected remote error");
    } catch (const engine::EngineError& e) {
        CHECK(e.kind() == engine::EngineError::Kind::remote);
        CHECK(e.remote_kind() == "not_found");
    }
    remote.shutdown();
}

TEST_CASE("handshake timeout against a silent engine") {
    ConnectionOptions o;
    o.handshake_timeout = 300ms;
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(spawn_fake("silent", o), HandshakeTimeout);
    CHECK(std::chrono::steady_clock::now() - start < 5s);
}

TEST_CASE("an engine that dies at startup is a spawn error carrying its stderr") {
    try {
        spawn_fake("die");
        FAIL("expected SpawnError");
    } catch (const SpawnError& e) {
        CHECK(std::string(e.what()).find("refusing to start") != std::string::npos);
    }
    CHECK_THROWS_AS(spawn_sidecar({"/nonexistent/engine-binary"}), SpawnError);
    CHECK_THROWS_AS(spawn_fake("bad-version"), SpawnError);
}

TEST_CASE("engine crash mid-call fails the call as closed") {
    RemoteEngine remote(spawn_fake("crash-on=render"));
    REQUIRE(remote.execute_program(testing::kBasicScene, engine::kLanguageScn).ok());
    try {
        remote.render(std::nullopt, {32, 32});
        FAIL("expected EngineError");
    } catch (const engine::EngineError& e) {
        CHECK(e.kind() == engine::EngineError::Kind::closed);
    }
    CHECK_FALSE(remote.connection().alive());
    CHECK_THROWS_AS(remote.get_scene_info(), engine::EngineError);
}

TEST_CASE("killing the engine while a call is pending") {
    RemoteEngine remote(spawn_fake("hang-on=render"));
    std::thread killer([&] {
        std::this_thread::sleep_for(200ms);
        remote.connection().kill();
    });
    try {
        remote.render(std::nullopt, {32, 32});
        FAIL("expected EngineError");
    } catch (const engine::EngineError& e) {
        CHECK(e.kind() == engine::EngineError::Kind::closed);
    }
    killer.join();
}

TEST_CASE("per-call timeout marks the connection dead") {
    ConnectionOptions o;
    o.long_call_timeout = 200ms;
    RemoteEngine remote(spawn_fake("hang-on=render", o));
    try {
        remote.render(std::nullopt, {32, 32});
        FAIL("expected timeout");
    } catch (const engine::EngineError& e) {
        CHECK(e.kind() == engine::EngineError::Kind::timeout);
    }
    CHECK_FALSE(remote.connection().alive());
}

TEST_CASE("responses with unknown ids are logged and dropped") {
    std::mutex m;
    std::vector<std::string> logs;
    ConnectionOptions o;
    o.log = [&](const std::string& s) {
        std::lock_guard lock(m);
        logs.push_back(s);
    };
    RemoteEngine remote(spawn_fake("stray-ids", o));
    CHECK(remote.execute_program(testing::kBasicScene, engine::kLanguageScn).ok());
    CHECK_FALSE(remote.get_scene_info().empty());
    remote.shutdown();
    std::lock_guard lock(m);
    bool saw = false;
    for (const auto& l : logs) saw = saw || l.find("999999") != std::string::npos;
    CHECK(saw);
}
