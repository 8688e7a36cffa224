#pragma once

#include "sceneloop/agent/trajectory.hpp"
#include "sceneloop/backend/chat.hpp"
#include "sceneloop/engine/engine.hpp"
#include "sceneloop/memory/assemble.hpp"
#include "sceneloop/tools/tools.hpp"

#include <exception>
#include <functional>

namespace sceneloop::agent {

struct EpisodeConfig {
    int max_rounds = 10;
    int window = memory::kDefaultWindow;
    int image_cap = memory::kDefaultImageCap;
    int verifier_budget = 8;
    int best_of = 1;
    std::int64_t seed = 0;
    // Generator turns allowed per round before the round counts as failed.
    int generator_turn_budget = 16;
    // In-band reminders for replies without a tool call.
    int no_call_retries = 3;
    // Concurrent episodes in best-of-N.
    int jobs = 1;
    scene::RenderConfig render;
    std::string language = engine::kLanguageScn;

    // Throws Error naming the first non-positive field.
    void validate() const;
};

struct EpisodeTask {
    std::string id;
    std::string kind;  // camera_adjust | edit | compositional | reconstruct | animate
    std::string instruction;
    std::vector<scene::Image> targets;
    std::optional<std::string> initial_program;
};

using Log = std::function<void(const std::string&)>;

struct EpisodeDeps {
    backend::Backend& backend;
    engine::Engine& engine;
    tools::AssetProvider* assets = nullptr;
    // Per-round metrics; fallback embedder when null.
    metrics::Embedder* embedder = nullptr;
    TrajectoryWriter* writer = nullptr;
    const memory::Prompts* prompts = nullptr;
    Log log;
};

// Backend or engine failure mid-episode. The rounds completed so far are in
// `partial` (and already on disk when a writer was given).
class EpisodeAborted : public Error {
public:
    EpisodeAborted(Trajectory partial, std::exception_ptr cause, std::string message, bool engine_failure);
    const Trajectory& partial() const { return partial_; }
    std::exception_ptr cause() const { return cause_; }
    bool engine_failure() const { return engine_failure_; }

private:
    Trajectory partial_;
    std::exception_ptr cause_;
    bool engine_failure_;
};

Trajectory run_episode(const EpisodeTask& task, const EpisodeConfig& config, const EpisodeDeps& deps,
                       int episode_index = 0);

class NoCandidates : public Error {
public:
    using Error::Error;
};

// Argmax cosine(embed(render), embed(target)) over every successful round's
// execution render. Ties: earlier episode, then later round.
Candidate select_best_candidate(const std::vector<Trajectory>& trajectories, const scene::Image& target,
                                metrics::Embedder& embedder);

using BackendFactory = std::function<std::shared_ptr<backend::Backend>(int episode)>;
using EngineFactory = std::function<std::unique_ptr<engine::Engine>(int episode)>;

struct BestOfN {
    Candidate best;
    std::vector<Trajectory> trajectories;  // surviving episodes, by episode id
    std::vector<std::string> failures;     // "episode k: message"
};

// config.best_of independent episodes (seed + i), each with its own backend,
// engine and memory, up to config.jobs at a time; then selection over the
// union. Throws NoCandidates when no round succeeded anywhere.
BestOfN run_best_of_n(const EpisodeTask& task, const EpisodeConfig& config, const BackendFactory& backends,
                      const EngineFactory& engines, tools::AssetProvider* assets, metrics::Embedder& embedder,
                      TrajectoryWriter* writer = nullptr, Log log = nullptr);

} // namespace sceneloop::agent
