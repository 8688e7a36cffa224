#include "sceneloop/protocol/server.hpp"

#include <fmt/format.h>
#include <istream>
#include <ostream>

namespace sceneloop::protocol {

namespace {

std::vector<std::string> string_list(const json& params, const char* key) {
    std::vector<std::string> out;
    if (!params.contains(key)) return out;
    const json& arr = params.at(key);
    if (!arr.is_array()) throw Error(fmt::format("'{}' must be an array of strings", key));
    for (const auto& v : arr) {
        if (!v.is_string()) throw Error(fmt::format("'{}' must be an array of strings", key));
        out.push_back(v.get<std::string>());
    }
    return out;
}

json bounds_to_json(const engine::BoundsReport& b) {
    json objects = json::array();
    for (const auto& o : b.objects) {
        objects.push_back({{"name", o.name}, {"min", vec_to_json(o.box.min)}, {"max", vec_to_json(o.box.max)},
                           {"radius", o.radius}});
    }
    return {{"min", vec_to_json(b.box.min)}, {"max", vec_to_json(b.box.max)}, {"objects", std::move(objects)}};
}

json dispatch(engine::Engine& eng, const EngineRequest& req, std::string_view engine_name) {
    const json& p = req.params;
    const std::string& m = req.method;
    if (m == method::reset) {
        eng.reset();
        return {{"protocol_version", kProtocolVersion}, {"engine", engine_name}};
    }
    if (m == method::render) {
        std::optional<scene::CameraPose> cam;
        if (p.contains("camera") && !p["camera"].is_null()) cam = pose_from_json(p["camera"]);
        scene::RenderConfig cfg;
        cfg.width = p.value("width", cfg.width);
        cfg.height = p.value("height", cfg.height);
        return image_to_json(eng.render(cam, cfg));
    }
    if (m == method::get_scene_info) return {{"text", eng.get_scene_info()}};
    if (m == method::set_camera) {
        eng.set_camera(pose_from_json(p));
        return json::object();
    }
    if (m == method::set_frame) {
        eng.set_frame(p.at("frame").get<int>());
        return json::object();
    }
    if (m == method::set_visibility) {
        eng.set_visibility(string_list(p, "show"), string_list(p, "hide"));
        return json::object();
    }
    if (m == method::list_bounds) {
        std::optional<int> frame;
        if (p.contains("frame") && !p["frame"].is_null()) frame = p["frame"].get<int>();
        return bounds_to_json(eng.list_bounds(string_list(p, "names"), frame));
    }
    if (m == method::shutdown) {
        eng.shutdown();
        return json::object();
    }
    throw engine::EngineError(engine::EngineError::Kind::remote, fmt::format("unknown method '{}'", m), engine::fault::unknown_method);
}

} // namespace

EngineResponse handle_request(engine::Engine& eng, const EngineRequest& req, std::string_view engine_name) {
    EngineResponse resp;
    resp.id = req.id;
    try {
        if (req.method == method::execute_program) {
            const json& p = req.params;
            auto report = eng.execute_program(p.at("source").get<std::string>(),
                                              p.value("language", std::string(engine::kLanguageScn)));
            if (report.failure) {
                resp.ok = false;
                resp.error = {engine::fault::exec_error, report.failure->message, report.failure->detail,
                              report.failure->line};
                return resp;
            }
            resp.result = {{"active_camera", report.active_camera ? pose_to_json(*report.active_camera) : json(nullptr)},
                           {"objects", report.object_count}};
            return resp;
        }
        resp.result = dispatch(eng, req, engine_name);
    } catch (const engine::EngineError& e) {
        resp.ok = false;
        resp.error = {e.remote_kind().empty() ? engine::fault::internal : e.remote_kind(), e.message(), e.detail(), {}};
    } catch (const json::exception& e) {
        resp.ok = false;
        resp.error = {engine::fault::invalid_argument, fmt::format("malformed params for '{}': {}", req.method, e.what()), "", {}};
    } catch (const std::exception& e) {
        resp.ok = false;
        resp.error = {engine::fault::invalid_argument, e.what(), "", {}};
    }
    return resp;
}

std::size_t serve(engine::Engine& eng, std::istream& in, std::ostream& out, std::string_view engine_name) {
    std::size_t served = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        EngineResponse resp;
        bool stop = false;
        try {
            Message msg = decode_message(line);
            auto* req = std::get_if<EngineRequest>(&msg);
            if (!req) {
                resp.id = -1;
                resp.ok = false;
                resp.error = {engine::fault::decode_error, "expected a request, got a response", "", {}};
            } else {
                resp = handle_request(eng, *req, engine_name);
                stop = req->method == method::shutdown;
                ++served;
            }
        } catch (const DecodeError& e) {
            resp = EngineResponse{};
            resp.id = -1;
            resp.ok = false;
            resp.error = {engine::fault::decode_error, e.what(), e.excerpt(), {}};
        }
        out << encode_message(resp);
        out.flush();
        if (stop) break;
    }
    return served;
}

} // namespace sceneloop::protocol
