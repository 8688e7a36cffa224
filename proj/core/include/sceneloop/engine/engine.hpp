#pragma once

#include "sceneloop/scene/bounds.hpp"
#include "sceneloop/scene/image.hpp"
#include "sceneloop/scene/render.hpp"
#include "sceneloop/scene/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sceneloop::engine {

using scene::CameraPose;
using scene::Image;
using scene::RenderConfig;

// Engine-side error kinds reported with EngineError::Kind::remote.
namespace fault {
inline constexpr const char* exec_error = "exec_error";
inline constexpr const char* not_found = "not_found";
inline constexpr const char* overlap = "overlap";
inline constexpr const char* no_camera = "no_camera";
inline constexpr const char* invalid_argument = "invalid_argument";
inline constexpr const char* unsupported_language = "unsupported_language";
inline constexpr const char* unknown_method = "unknown_method";
inline constexpr const char* decode_error = "decode_error";
inline constexpr const char* internal = "internal";
} // namespace fault

class EngineError : public Error {
public:
    enum class Kind { timeout, closed, spawn, handshake_timeout, remote };

    EngineError(Kind kind, std::string message, std::string remote_kind = {}, std::string detail = {});

    Kind kind() const { return kind_; }
    // For Kind::remote: one of the fault:: names (raised by the engine itself,
    // in-process or across the protocol).
    const std::string& remote_kind() const { return remote_kind_; }
    const std::string& message() const { return message_; }
    const std::string& detail() const { return detail_; }

private:
    Kind kind_;
    std::string message_;
    std::string remote_kind_;
    std::string detail_;
};

std::string_view to_string(EngineError::Kind kind);

struct ExecFailure {
    int line = 0;
    std::string message;
    // Full error log handed back to the generator.
    std::string detail;
    bool operator==(const ExecFailure&) const = default;
};

struct ExecReport {
    std::optional<ExecFailure> failure;
    std::optional<CameraPose> active_camera;
    int object_count = 0;

    bool ok() const { return !failure.has_value(); }
};

struct BoundsReport {
    scene::Aabb box;
    std::vector<scene::ObjectBounds> objects;
};

inline constexpr const char* kLanguageScn = "scn";
inline constexpr const char* kLanguageBlenderPython = "blender-python";

// The world an episode writes programs against: in-process or behind the
// line-delimited JSON protocol.
class Engine {
public:
    virtual ~Engine() = default;

    virtual void reset() = 0;
    // Script failures are reported in the ExecReport; EngineError is for
    // transport failures and unsupported languages. A failed program leaves
    // the previous world in place.
    virtual ExecReport execute_program(const std::string& source, const std::string& language) = 0;
    // nullopt renders through the scene's active camera (fault::no_camera if none).
    virtual Image render(const std::optional<CameraPose>& camera, const RenderConfig& config) = 0;
    virtual std::string get_scene_info() = 0;
    // Overwrites the active camera; creates "Camera" when the scene has none.
    virtual void set_camera(const CameraPose& pose) = 0;
    virtual void set_frame(int frame) = 0;
    virtual void set_visibility(const std::vector<std::string>& show, const std::vector<std::string>& hide) = 0;
    // Empty `names` means the whole scene; nullopt frame means the current frame.
    virtual BoundsReport list_bounds(const std::vector<std::string>& names, std::optional<int> frame) = 0;
    virtual void shutdown() = 0;
};

} // namespace sceneloop::engine
