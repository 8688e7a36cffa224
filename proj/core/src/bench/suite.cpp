#include "sceneloop/bench/suite.hpp"

#include "sceneloop/backend/replay.hpp"
#include "sceneloop/engine/embedded_engine.hpp"
#include "sceneloop/protocol/connection.hpp"

#include <fmt/format.h>

#include <atomic>
#include <fstream>
#include <thread>

namespace sceneloop::bench {

SuiteManifest load_manifest(const fs::path& suite_dir) {
    const fs::path file = suite_dir / "suite.json";
    std::ifstream in(file);
    if (!in) throw FormatError("", "cannot open suite manifest", file);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw FormatError("", "manifest must be a JSON object", file);
    if (j.value("schema_version", 0) != kTaskSchemaVersion)
        throw FormatError("/schema_version", fmt::format("unsupported version (expected {})", kTaskSchemaVersion), file);
    SuiteManifest m;
    m.name = j.value("name", suite_dir.filename().string());
    if (!j.contains("tasks") || !j.at("tasks").is_array()) throw FormatError("/tasks", "expected an array", file);
    const fs::path base = fs::absolute(suite_dir);
    for (size_t i = 0; i < j.at("tasks").size(); ++i) {
        const json& t = j.at("tasks")[i];
        if (!t.is_string()) throw FormatError(fmt::format("/tasks/{}", i), "expected a path", file);
        fs::path p(t.get<std::string>());
        m.tasks.push_back((p.is_absolute() ? p : base / p).lexically_normal());
    }
    return m;
}

TaskBackendFactory replay_backend_factory() {
    return [](const TaskInstance& t, int episode) -> std::shared_ptr<backend::Backend> {
        if (!t.replay) throw Error(fmt::format("task '{}' has no replay script", t.id));
        return std::make_shared<backend::ReplayBackend>(backend::ReplayScript::load(*t.replay),
                                                        static_cast<std::size_t>(episode));
    };
}

TaskBackendFactory shared_backend_factory(std::shared_ptr<backend::Backend> backend) {
    return [backend](const TaskInstance&, int) { return backend; };
}

namespace {

fs::path asset_root(const TaskInstance& t) {
    if (t.assets_dir) return *t.assets_dir;
    return t.source.empty() ? fs::current_path() : fs::absolute(t.source).parent_path();
}

} // namespace

TaskEngineFactory embedded_engine_factory() {
    return [](const TaskInstance& t, int) -> std::unique_ptr<engine::Engine> {
        if (t.engine == EngineRequirement::external)
            throw Error(fmt::format("task '{}' requires an external engine", t.id));
        return std::make_unique<engine::EmbeddedEngine>(scene::ExecOptions{asset_root(t)});
    };
}

TaskEngineFactory subprocess_engine_factory(std::vector<std::string> command) {
    return [command](const TaskInstance& t, int) -> std::unique_ptr<engine::Engine> {
        auto conn = protocol::spawn_sidecar(command, {{"SCENELOOP_ASSET_ROOT", asset_root(t).string()}});
        return std::make_unique<protocol::RemoteEngine>(std::move(conn));
    };
}

std::vector<KindAggregate> aggregate_rows(const std::vector<TaskRow>& rows) {
    std::vector<KindAggregate> out;
    for (TaskKind k : {TaskKind::camera_adjust, TaskKind::edit, TaskKind::compositional, TaskKind::reconstruct,
                       TaskKind::animate}) {
        KindAggregate a;
        a.kind = k;
        double pl = 0, nc = 0, vlm = 0;
        int npl = 0, nnc = 0, nvlm = 0;
        for (const auto& r : rows) {
            if (r.kind != k) continue;
            if (!r.completed) {
                ++a.failed;
                continue;
            }
            ++a.completed;
            if (r.report.pl) pl += *r.report.pl, ++npl;
            if (r.report.n_clip) nc += *r.report.n_clip, ++nnc;
            if (r.report.vlm_score) vlm += *r.report.vlm_score, ++nvlm;
        }
        if (a.completed + a.failed == 0) continue;
        if (npl) a.mean_pl = pl / npl;
        if (nnc) a.mean_n_clip = nc / nnc;
        if (nvlm) a.mean_vlm = vlm / nvlm;
        out.push_back(a);
    }
    return out;
}

TaskRow run_task(const TaskInstance& task, const SuiteConfig& config) {
    TaskRow row;
    row.id = task.id;
    row.kind = task.kind;
    try {
        const agent::EpisodeTask et = make_episode_task(task);
        row.target = et.targets.front();
        std::optional<agent::TrajectoryWriter> writer;
        if (config.trajectory_root) writer.emplace(*config.trajectory_root / task.id);
        std::unique_ptr<tools::StubAssetProvider> assets;
        if (task.assets_dir) assets = std::make_unique<tools::StubAssetProvider>(*task.assets_dir);
        metrics::FallbackEmbedder fallback;
        metrics::Embedder& embedder = config.embedder ? *config.embedder : fallback;

        auto best = agent::run_best_of_n(
            et, config.episode, [&](int k) { return config.backends(task, k); },
            [&](int k) { return config.engines(task, k); }, assets.get(), embedder, writer ? &*writer : nullptr,
            config.log);
        row.completed = true;
        row.episode = best.best.episode;
        row.round = best.best.round;
        row.score = best.best.score;
        row.episodes_failed = static_cast<int>(best.failures.size());
        row.final_render = best.best.render;
        row.report = metrics::evaluate(best.best.render, et.targets, embedder,
                                       task.metrics.vlm ? config.judge.get() : nullptr, task.instruction, task.metrics);
    } catch (const std::exception& e) {
        row.completed = false;
        row.failure = e.what();
    }
    return row;
}

SuiteResult run_suite(const fs::path& suite_dir, const SuiteConfig& config) {
    const SuiteManifest manifest = load_manifest(suite_dir);
    SuiteResult result;
    result.name = manifest.name;
    result.config = config.snapshot;
    result.rows.resize(manifest.tasks.size());

    auto run_one = [&](size_t i) {
        const fs::path& file = manifest.tasks[i];
        TaskInstance task;
        try {
            task = load_task(file);
        } catch (const std::exception& e) {
            result.rows[i].id = file.stem().string();
            result.rows[i].failure = e.what();
            return;
        }
        if (config.log) config.log(fmt::format("task {} ({})", task.id, to_string(task.kind)));
        result.rows[i] = run_task(task, config);
    };

    const size_t n = manifest.tasks.size();
    const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(n)));
    if (jobs <= 1) {
        for (size_t i = 0; i < n; ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (size_t i = next++; i < n; i = next++) run_one(i);
            });
        for (auto& t : pool) t.join();
    }
    result.aggregates = aggregate_rows(result.rows);
    return result;
}

} // namespace sceneloop::bench
