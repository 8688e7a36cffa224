#include "sceneloop/protocol/message.hpp"

#include "sceneloop/util/base64.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace sceneloop::protocol {

bool is_known_method(std::string_view name) {
    static constexpr std::string_view kMethods[] = {
        method::reset,      method::execute_program, method::render,      method::get_scene_info, method::set_camera,
        method::set_frame, method::set_visibility,  method::list_bounds, method::shutdown,
    };
    return std::find(std::begin(kMethods), std::end(kMethods), name) != std::end(kMethods);
}

DecodeError::DecodeError(std::string reason, std::string_view line)
    : Error(fmt::format("decode error: {} (line starts: \"{}\")", reason, std::string(line.substr(0, 80)))),
      excerpt_(line.substr(0, 200)) {}

std::string encode_message(const EngineRequest& request) {
    json j = {{"id", request.id}, {"method", request.method}, {"params", request.params}};
    return j.dump() + "\n";
}

std::string encode_message(const EngineResponse& response) {
    json j = {{"id", response.id}, {"ok", response.ok}};
    if (response.ok) {
        j["result"] = response.result;
    } else {
        json err = {{"kind", response.error.kind}, {"message", response.error.message}, {"detail", response.error.detail}};
        if (response.error.line) err["line"] = *response.error.line;
        j["error"] = std::move(err);
    }
    return j.dump() + "\n";
}

Message decode_message(std::string_view line) {
    if (line.size() > kMaxLineBytes) throw DecodeError(fmt::format("line exceeds {} bytes", kMaxLineBytes), line);
    if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DecodeError(e.what(), line);
    }
    if (!j.is_object()) throw DecodeError("message is not a JSON object", line);
    if (!j.contains("id") || !j["id"].is_number_integer()) throw DecodeError("missing integer 'id'", line);
    const std::int64_t id = j["id"].get<std::int64_t>();

    if (j.contains("method")) {
        if (!j["method"].is_string()) throw DecodeError("'method' must be a string", line);
        EngineRequest req;
        req.id = id;
        req.method = j["method"].get<std::string>();
        if (j.contains("params")) {
            if (!j["params"].is_object()) throw DecodeError("'params' must be an object", line);
            req.params = j["params"];
        }
        return req;
    }
    if (!j.contains("ok") || !j["ok"].is_boolean()) throw DecodeError("neither a request nor a response", line);
    EngineResponse resp;
    resp.id = id;
    resp.ok = j["ok"].get<bool>();
    const bool has_result = j.contains("result");
    const bool has_error = j.contains("error");
    if (has_result == has_error) throw DecodeError("exactly one of 'result' and 'error' must be present", line);
    if (resp.ok != has_result) throw DecodeError("'ok' disagrees with the payload", line);
    if (resp.ok) {
        resp.result = j["result"];
    } else {
        const json& e = j["error"];
        if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string()) throw DecodeError("malformed error object", line);
        resp.error.kind = e["kind"].get<std::string>();
        resp.error.message = e.value("message", "");
        resp.error.detail = e.value("detail", "");
        if (e.contains("line") && e["line"].is_number_integer()) resp.error.line = e["line"].get<int>();
    }
    return resp;
}

json vec_to_json(const scene::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

scene::Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw Error("expected a 3-element numeric array");
    for (const auto& x : j) {
        if (!x.is_number()) throw Error("expected a 3-element numeric array");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json pose_to_json(const scene::CameraPose& pose) {
    return {{"location", vec_to_json(pose.location)},
            {"rotation_euler", vec_to_json(pose.rotation_euler)},
            {"fov_y", pose.fov_y}};
}

scene::CameraPose pose_from_json(const json& j) {
    if (!j.is_object()) throw Error("camera pose must be an object");
    scene::CameraPose pose;
    pose.location = vec_from_json(j.at("location"));
    pose.rotation_euler = vec_from_json(j.at("rotation_euler"));
    if (j.contains("fov_y")) pose.fov_y = j.at("fov_y").get<double>();
    return pose;
}

json image_to_json(const scene::Image& image) {
    return {{"width", image.width()}, {"height", image.height()}, {"png", base64::encode(scene::encode_png(image))}};
}

scene::Image image_from_json(const json& j) {
    return scene::decode_png(base64::decode(j.at("png").get<std::string>()));
}

} // namespace sceneloop::protocol
