#pragma once

#include "sceneloop/backend/chat.hpp"
#include "sceneloop/memory/memory.hpp"

namespace sceneloop::memory {

struct Prompts {
    std::string generator_system;
    std::string verifier_system;
};

// Built-in prompts for the .scn engine.
const Prompts& default_prompts();

// [system, task + targets, plan?, one block per retained round]. At most
// memory.image_cap() round renders are embedded, newest first; older ones
// become text placeholders. Target images are always embedded.
std::vector<backend::ChatMessage> assemble_generator_context(const ContextMemory& memory,
                                                             const Prompts& prompts = default_prompts());

// [system, task + targets, plan?, code editions of the last window-1 committed
// rounds, current round with its renders]. Throws PreconditionError when
// `current` did not execute successfully.
std::vector<backend::ChatMessage> assemble_verifier_context(const ContextMemory& memory, const RoundRecord& current,
                                                            const Prompts& prompts = default_prompts());

} // namespace sceneloop::memory
