#pragma once

#include "sceneloop/bench/task.hpp"
#include "sceneloop/metrics/judge.hpp"

#include <functional>
#include <map>
#include <memory>

namespace sceneloop::bench {

struct SuiteManifest {
    std::string name;
    std::vector<fs::path> tasks;  // absolute, in manifest order
};

// suite.json: {"schema_version": 1, "name": ..., "tasks": ["a.json", ...]}.
SuiteManifest load_manifest(const fs::path& suite_dir);

using TaskBackendFactory = std::function<std::shared_ptr<backend::Backend>(const TaskInstance&, int episode)>;
using TaskEngineFactory = std::function<std::unique_ptr<engine::Engine>(const TaskInstance&, int episode)>;

// Replay backend from the task's "replay" script; episode k plays script
// episode k.
TaskBackendFactory replay_backend_factory();
// One backend shared by every task and episode.
TaskBackendFactory shared_backend_factory(std::shared_ptr<backend::Backend> backend);
TaskEngineFactory embedded_engine_factory();
// Spawns `command` per episode; SCENELOOP_ASSET_ROOT carries the task's assets_dir.
TaskEngineFactory subprocess_engine_factory(std::vector<std::string> command);

struct SuiteConfig {
    agent::EpisodeConfig episode;
    TaskBackendFactory backends;
    TaskEngineFactory engines;
    // Selection and metrics; the fallback embedder when null.
    std::shared_ptr<metrics::Embedder> embedder;
    std::shared_ptr<metrics::Judge> judge;
    // Tasks in flight at once.
    int jobs = 1;
    // Trajectories go to <trajectory_root>/<task id>/ when set.
    std::optional<fs::path> trajectory_root;
    agent::Log log;
    // Free-form description of the configuration, copied into the result.
    json snapshot = json::object();
};

struct TaskRow {
    std::string id;
    std::optional<TaskKind> kind;  // empty when the task file did not load
    bool completed = false;
    std::string failure;  // when !completed
    metrics::MetricReport report;
    int episode = 0;
    int round = 0;
    double score = 0;
    int episodes_failed = 0;
    scene::Image final_render;
    scene::Image target;
};

struct KindAggregate {
    TaskKind kind = TaskKind::reconstruct;
    int completed = 0;
    int failed = 0;
    std::optional<double> mean_pl;
    std::optional<double> mean_n_clip;
    std::optional<double> mean_vlm;
};

struct SuiteResult {
    std::string name;
    std::vector<TaskRow> rows;            // manifest order
    std::vector<KindAggregate> aggregates;  // kinds in enum order, only those present
    json config = json::object();
};

// Means over completed rows only; counts say how many went in.
std::vector<KindAggregate> aggregate_rows(const std::vector<TaskRow>& rows);

// Runs best-of-N for one loaded task and scores the selected candidate.
TaskRow run_task(const TaskInstance& task, const SuiteConfig& config);

// Task failures (load, engine, backend, no candidates) become failure rows.
SuiteResult run_suite(const fs::path& suite_dir, const SuiteConfig& config);

} // namespace sceneloop::bench
