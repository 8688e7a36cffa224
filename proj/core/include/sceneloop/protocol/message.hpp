#pragma once

#include "sceneloop/engine/engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace sceneloop::protocol {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxLineBytes = 64ull * 1024 * 1024;

// Method names are fixed by the protocol.
namespace method {
inline constexpr const char* reset = "reset";
inline constexpr const char* execute_program = "execute_program";
inline constexpr const char* render = "render";
inline constexpr const char* get_scene_info = "get_scene_info";
inline constexpr const char* set_camera = "set_camera";
inline constexpr const char* set_frame = "set_frame";
inline constexpr const char* set_visibility = "set_visibility";
inline constexpr const char* list_bounds = "list_bounds";
inline constexpr const char* shutdown = "shutdown";
} // namespace method

bool is_known_method(std::string_view name);

struct EngineRequest {
    std::int64_t id = 0;
    std::string method;
    json params = json::object();
    bool operator==(const EngineRequest&) const = default;
};

struct ErrorInfo {
    std::string kind;
    std::string message;
    std::string detail;
    std::optional<int> line;
    bool operator==(const ErrorInfo&) const = default;
};

struct EngineResponse {
    std::int64_t id = 0;
    bool ok = true;
    json result = json::object();  // when ok
    ErrorInfo error;               // when !ok
    bool operator==(const EngineResponse&) const = default;
};

using Message = std::variant<EngineRequest, EngineResponse>;

class DecodeError : public Error {
public:
    DecodeError(std::string reason, std::string_view line);
    const std::string& excerpt() const { return excerpt_; }

private:
    std::string excerpt_;
};

// One compact JSON object terminated by '\n'.
std::string encode_message(const EngineRequest& request);
std::string encode_message(const EngineResponse& response);
// Accepts a line with or without its trailing '\n'.
Message decode_message(std::string_view line);

// Parameter and result codecs shared by client and server.
json pose_to_json(const scene::CameraPose& pose);
scene::CameraPose pose_from_json(const json& j);
json vec_to_json(const scene::Vec3& v);
scene::Vec3 vec_from_json(const json& j);
json image_to_json(const scene::Image& image);
scene::Image image_from_json(const json& j);

} // namespace sceneloop::protocol
