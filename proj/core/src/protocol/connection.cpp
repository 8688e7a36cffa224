#include "sceneloop/protocol/connection.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <fmt/format.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace sceneloop::protocol {

using engine::EngineError;
using Kind = EngineError::Kind;

namespace {

void ignore_sigpipe() {
    static const bool once = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)once;
}

bool write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        data.remove_prefix(static_cast<size_t>(n));
    }
    return true;
}

std::chrono::milliseconds default_timeout(const std::string& method, const ConnectionOptions& o) {
    return method == method::execute_program || method == method::render ? o.long_call_timeout : o.short_call_timeout;
}

} // namespace

EngineConnection::EngineConnection(int pid, int to_child, int from_child, int err_child, ConnectionOptions options)
    : pid_(pid), to_child_(to_child), from_child_(from_child), err_child_(err_child), options_(std::move(options)) {
    reader_ = std::thread([this] { read_loop(); });
    err_reader_ = std::thread([this] { stderr_loop(); });
}

EngineConnection::~EngineConnection() {
    {
        std::lock_guard lock(write_mutex_);
        if (to_child_ >= 0) {
            ::close(to_child_);
            to_child_ = -1;
        }
    }
    // Give a well-behaved engine a moment to exit on EOF, then force it.
    bool exited = false;
    for (int i = 0; i < 50 && !exited; ++i) {
        int status = 0;
        exited = ::waitpid(pid_, &status, WNOHANG) == pid_;
        if (!exited) std::this_thread::sleep_for(10ms);
    }
    if (!exited) {
        ::kill(pid_, SIGKILL);
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
    if (reader_.joinable()) reader_.join();
    if (err_reader_.joinable()) err_reader_.join();
    ::close(from_child_);
    ::close(err_child_);
}

void EngineConnection::read_loop() {
    std::string buffer;
    char chunk[65536];
    while (true) {
        const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<size_t>(n));
        size_t start = 0;
        while (true) {
            const size_t nl = buffer.find('\n', start);
            if (nl == std::string::npos) break;
            std::string_view line(buffer.data() + start, nl - start);
            start = nl + 1;
            if (line.empty()) continue;
            try {
                Message msg = decode_message(line);
                auto* resp = std::get_if<EngineResponse>(&msg);
                if (!resp) {
                    if (options_.log) options_.log("engine sent a request line; dropped");
                    continue;
                }
                std::lock_guard lock(mutex_);
                auto it = pending_.find(resp->id);
                if (it == pending_.end()) {
                    if (options_.log) options_.log(fmt::format("dropped response with unknown id {}", resp->id));
                    continue;
                }
                it->second->response = std::move(*resp);
                it->second->done = true;
                pending_.erase(it);
                cv_.notify_all();
            } catch (const DecodeError& e) {
                if (options_.log) options_.log(e.what());
            }
        }
        buffer.erase(0, start);
        if (buffer.size() > kMaxLineBytes) {
            if (options_.log) options_.log("engine line exceeds size cap; closing");
            break;
        }
    }
    fail_all(EngineError(Kind::closed, "engine closed its output stream"));
}

void EngineConnection::stderr_loop() {
    std::string partial;
    char chunk[4096];
    while (true) {
        const ssize_t n = ::read(err_child_, chunk, sizeof(chunk));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        partial.append(chunk, static_cast<size_t>(n));
        size_t nl;
        while ((nl = partial.find('\n')) != std::string::npos) {
            std::string line = partial.substr(0, nl);
            partial.erase(0, nl + 1);
            {
                std::lock_guard lock(mutex_);
                if (stderr_buffer_.size() < (1u << 20)) stderr_buffer_ += line + "\n";
            }
            if (options_.log) options_.log("[engine] " + line);
        }
    }
}

void EngineConnection::fail_all(const EngineError& error) {
    std::lock_guard lock(mutex_);
    if (!dead_) {
        dead_ = true;
        dead_reason_ = error.message();
    }
    for (auto& [id, p] : pending_) {
        p->error = error;
        p->done = true;
    }
    pending_.clear();
    cv_.notify_all();
}

bool EngineConnection::alive() const {
    std::lock_guard lock(mutex_);
    return !dead_;
}

std::string EngineConnection::stderr_log() const {
    std::lock_guard lock(mutex_);
    return stderr_buffer_;
}

void EngineConnection::kill() { ::kill(pid_, SIGKILL); }

EngineResponse EngineConnection::request(const std::string& method, json params,
                                         std::optional<std::chrono::milliseconds> timeout) {
    auto pending = std::make_shared<Pending>();
    std::int64_t id;
    {
        std::lock_guard lock(mutex_);
        if (dead_) throw EngineError(Kind::closed, "connection is dead: " + dead_reason_);
        id = next_id_++;
        pending_[id] = pending;
    }
    const std::string line = encode_message(EngineRequest{id, method, std::move(params)});
    bool written;
    {
        std::lock_guard lock(write_mutex_);
        written = to_child_ >= 0 && write_all(to_child_, line);
    }
    if (!written) {
        EngineError err(Kind::closed, "failed writing to engine stdin");
        fail_all(err);
        throw err;
    }
    std::unique_lock lock(mutex_);
    const auto limit = timeout.value_or(default_timeout(method, options_));
    if (!cv_.wait_for(lock, limit, [&] { return pending->done; })) {
        lock.unlock();
        EngineError err(Kind::timeout, fmt::format("'{}' timed out after {} ms", method, limit.count()));
        fail_all(err);
        throw err;
    }
    if (pending->error) throw *pending->error;
    return std::move(pending->response);
}

json EngineConnection::call(const std::string& method, json params, std::optional<std::chrono::milliseconds> timeout) {
    EngineResponse resp = request(method, std::move(params), timeout);
    if (!resp.ok) throw EngineError(Kind::remote, resp.error.message, resp.error.kind, resp.error.detail);
    return std::move(resp.result);
}

std::unique_ptr<EngineConnection> spawn_sidecar(const std::vector<std::string>& command,
                                                const std::map<std::string, std::string>& env,
                                                ConnectionOptions options) {
    if (command.empty()) throw SpawnError("empty engine command");
    ignore_sigpipe();

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw SpawnError(std::strerror(errno));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw SpawnError(std::strerror(errno));
    if (::pipe2(err_pipe, O_CLOEXEC) != 0) throw SpawnError(std::strerror(errno));

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);

    std::vector<std::string> env_strings;
    for (char** e = environ; *e; ++e) {
        std::string_view entry(*e);
        const auto key = entry.substr(0, entry.find('='));
        if (!env.count(std::string(key))) env_strings.emplace_back(entry);
    }
    for (const auto& [k, v] : env) env_strings.push_back(k + "=" + v);
    std::vector<char*> envp;
    for (auto& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);

    std::vector<std::string> args = command;
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);

    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), envp.data());
    posix_spawn_file_actions_destroy(&actions);
    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    if (rc != 0) {
        ::close(in_pipe[1]);
        ::close(out_pipe[0]);
        ::close(err_pipe[0]);
        throw SpawnError(fmt::format("cannot start '{}': {}", command[0], std::strerror(rc)));
    }

    const auto handshake_timeout = options.handshake_timeout;
    std::unique_ptr<EngineConnection> conn(
        new EngineConnection(pid, in_pipe[1], out_pipe[0], err_pipe[0], std::move(options)));
    json result;
    try {
        result = conn->call(method::reset, json::object(), handshake_timeout);
    } catch (const EngineError& e) {
        if (e.kind() == Kind::timeout) {
            throw HandshakeTimeout(fmt::format("no reply to reset within {} ms", handshake_timeout.count()));
        }
        if (e.kind() == Kind::closed) {
            throw SpawnError(fmt::format("'{}' exited during handshake: {}", command[0], conn->stderr_log()));
        }
        throw;
    }
    conn->protocol_version_ = result.value("protocol_version", 0);
    if (conn->protocol_version_ != kProtocolVersion) {
        throw SpawnError(fmt::format("engine speaks protocol version {}, expected {}", conn->protocol_version_,
                                     kProtocolVersion));
    }
    return conn;
}

RemoteEngine::RemoteEngine(std::unique_ptr<EngineConnection> connection) : connection_(std::move(connection)) {}

void RemoteEngine::reset() { connection_->call(method::reset, json::object()); }

engine::ExecReport RemoteEngine::execute_program(const std::string& source, const std::string& language) {
    EngineResponse resp =
        connection_->request(method::execute_program, {{"source", source}, {"language", language}});
    engine::ExecReport report;
    if (!resp.ok) {
        if (resp.error.kind != engine::fault::exec_error) {
            throw EngineError(Kind::remote, resp.error.message, resp.error.kind, resp.error.detail);
        }
        report.failure = engine::ExecFailure{resp.error.line.value_or(0), resp.error.message, resp.error.detail};
        return report;
    }
    if (resp.result.contains("active_camera") && !resp.result["active_camera"].is_null()) {
        report.active_camera = pose_from_json(resp.result["active_camera"]);
    }
    report.object_count = resp.result.value("objects", 0);
    return report;
}

scene::Image RemoteEngine::render(const std::optional<scene::CameraPose>& camera, const scene::RenderConfig& config) {
    json params = {{"camera", camera ? pose_to_json(*camera) : json(nullptr)},
                   {"width", config.width},
                   {"height", config.height}};
    return image_from_json(connection_->call(method::render, std::move(params)));
}

std::string RemoteEngine::get_scene_info() {
    return connection_->call(method::get_scene_info, json::object()).at("text").get<std::string>();
}

void RemoteEngine::set_camera(const scene::CameraPose& pose) { connection_->call(method::set_camera, pose_to_json(pose)); }

void RemoteEngine::set_frame(int frame) { connection_->call(method::set_frame, {{"frame", frame}}); }

void RemoteEngine::set_visibility(const std::vector<std::string>& show, const std::vector<std::string>& hide) {
    connection_->call(method::set_visibility, {{"show", show}, {"hide", hide}});
}

engine::BoundsReport RemoteEngine::list_bounds(const std::vector<std::string>& names, std::optional<int> frame) {
    json r = connection_->call(method::list_bounds, {{"names", names}, {"frame", frame ? json(*frame) : json(nullptr)}});
    engine::BoundsReport b;
    b.box = {vec_from_json(r.at("min")), vec_from_json(r.at("max"))};
    for (const auto& o : r.at("objects")) {
        b.objects.push_back({o.at("name").get<std::string>(),
                             {vec_from_json(o.at("min")), vec_from_json(o.at("max"))},
                             o.at("radius").get<double>()});
    }
    return b;
}

void RemoteEngine::shutdown() {
    if (connection_->alive()) connection_->call(method::shutdown, json::object());
}

} // namespace sceneloop::protocol
