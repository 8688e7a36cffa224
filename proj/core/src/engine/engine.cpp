#include "sceneloop/engine/engine.hpp"

#include <fmt/format.h>

namespace sceneloop::engine {

std::string_view to_string(EngineError::Kind kind) {
    switch (kind) {
    case EngineError::Kind::timeout: return "timeout";
    case EngineError::Kind::closed: return "closed";
    case EngineError::Kind::spawn: return "spawn";
    case EngineError::Kind::handshake_timeout: return "handshake_timeout";
    case EngineError::Kind::remote: return "remote";
    }
    return "unknown";
}

EngineError::EngineError(Kind kind, std::string message, std::string remote_kind, std::string detail)
    : Error(remote_kind.empty() ? fmt::format("engine error ({}): {}", to_string(kind), message)
                                : fmt::format("engine error ({}/{}): {}", to_string(kind), remote_kind, message)),
      kind_(kind), message_(std::move(message)), remote_kind_(std::move(remote_kind)), detail_(std::move(detail)) {}

} // namespace sceneloop::engine
