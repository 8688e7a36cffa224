#pragma once

#include "sceneloop/protocol/message.hpp"

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sceneloop::protocol {

using namespace std::chrono_literals;

struct ConnectionOptions {
    std::chrono::milliseconds long_call_timeout = 120s;   // execute_program, render
    std::chrono::milliseconds short_call_timeout = 10s;   // everything else
    std::chrono::milliseconds handshake_timeout = 30s;
    // Receives the child's stderr, line by line, and dropped-response notices.
    std::function<void(const std::string&)> log;
};

// Client end of a spawned engine process speaking the protocol on stdio.
// A reader thread correlates responses by id; responses with unknown ids are
// logged and dropped. Timeout or EOF marks the connection dead and fails all
// pending calls.
class EngineConnection {
public:
    ~EngineConnection();
    EngineConnection(const EngineConnection&) = delete;
    EngineConnection& operator=(const EngineConnection&) = delete;

    // Raw response; throws EngineError only for timeout | closed.
    EngineResponse request(const std::string& method, json params,
                           std::optional<std::chrono::milliseconds> timeout = std::nullopt);
    // Returns `result` on ok; throws EngineError (timeout | closed | remote).
    json call(const std::string& method, json params, std::optional<std::chrono::milliseconds> timeout = std::nullopt);

    bool alive() const;
    int pid() const { return pid_; }
    int protocol_version() const { return protocol_version_; }
    std::string stderr_log() const;
    // Sends SIGKILL to the child (tests use this to simulate engine death).
    void kill();

private:
    friend std::unique_ptr<EngineConnection> spawn_sidecar(const std::vector<std::string>&,
                                                           const std::map<std::string, std::string>&,
                                                           ConnectionOptions);
    EngineConnection(int pid, int to_child, int from_child, int err_child, ConnectionOptions options);

    struct Pending {
        bool done = false;
        EngineResponse response;
        std::optional<engine::EngineError> error;
    };

    void read_loop();
    void stderr_loop();
    void fail_all(const engine::EngineError& error);

    int pid_;
    int to_child_;
    int from_child_;
    int err_child_;
    ConnectionOptions options_;
    int protocol_version_ = 0;

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::map<std::int64_t, std::shared_ptr<Pending>> pending_;
    std::int64_t next_id_ = 1;
    bool dead_ = false;
    std::string dead_reason_;
    std::mutex write_mutex_;
    std::string stderr_buffer_;

    std::thread reader_;
    std::thread err_reader_;
};

class SpawnError : public engine::EngineError {
public:
    explicit SpawnError(std::string message) : EngineError(Kind::spawn, std::move(message)) {}
};

class HandshakeTimeout : public engine::EngineError {
public:
    explicit HandshakeTimeout(std::string message) : EngineError(Kind::handshake_timeout, std::move(message)) {}
};

// Starts `command` (argv[0] resolved via PATH) with `env` added to the current
// environment, then sends {method:"reset"} and waits for ok within the
// handshake timeout.
std::unique_ptr<EngineConnection> spawn_sidecar(const std::vector<std::string>& command,
                                                const std::map<std::string, std::string>& env = {},
                                                ConnectionOptions options = {});

// Engine facade over a connection; remote faults surface as EngineError(remote).
class RemoteEngine final : public engine::Engine {
public:
    explicit RemoteEngine(std::unique_ptr<EngineConnection> connection);

    void reset() override;
    engine::ExecReport execute_program(const std::string& source, const std::string& language) override;
    scene::Image render(const std::optional<scene::CameraPose>& camera, const scene::RenderConfig& config) override;
    std::string get_scene_info() override;
    void set_camera(const scene::CameraPose& pose) override;
    void set_frame(int frame) override;
    void set_visibility(const std::vector<std::string>& show, const std::vector<std::string>& hide) override;
    engine::BoundsReport list_bounds(const std::vector<std::string>& names, std::optional<int> frame) override;
    void shutdown() override;

    EngineConnection& connection() { return *connection_; }

private:
    std::unique_ptr<EngineConnection> connection_;
};

} // namespace sceneloop::protocol
