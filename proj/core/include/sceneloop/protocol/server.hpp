#pragma once

#include "sceneloop/protocol/message.hpp"

#include <iosfwd>

namespace sceneloop::protocol {

// Executes one request against an engine; never throws.
EngineResponse handle_request(engine::Engine& engine, const EngineRequest& request, std::string_view engine_name);

// Serial request loop: one response per request line, until `shutdown` or EOF.
// Undecodable lines get an error response with id -1. Returns the number of
// requests served.
std::size_t serve(engine::Engine& engine, std::istream& in, std::ostream& out, std::string_view engine_name = "embedded");

} // namespace sceneloop::protocol
