#pragma once

#include "sceneloop/scene/program.hpp"
#include "sceneloop/scene/types.hpp"

#include <filesystem>

namespace sceneloop::scene {

// Execution failure; the message is what the generator sees as the error log.
class ExecError : public Error {
public:
    ExecError(int line, std::string statement, std::string message);
    int line() const { return line_; }
    const std::string& statement() const { return statement_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    std::string statement_;
    std::string message_;
};

struct ExecOptions {
    // Relative `add_mesh` paths resolve against this directory.
    std::filesystem::path asset_root = ".";
};

// Rebuilds a world from scratch by interpreting statements in order.
SceneState execute_program(const Program& program, const ExecOptions& options = {});

// parse_program + execute_program; parse errors surface as ExecError.
SceneState execute_source(std::string_view source, const ExecOptions& options = {});

} // namespace sceneloop::scene
