#include "sceneloop/agent/episode.hpp"
#include "sceneloop/backend/replay.hpp"
#include "sceneloop/bench/task.hpp"
#include "sceneloop/engine/embedded_engine.hpp"
#include "sceneloop/protocol/connection.hpp"

#include <benchmark/benchmark.h>

using namespace sceneloop;

namespace {

const char* const kScene = R"(set_background color=(0.05,0.05,0.05) ambient=0.3
add_primitive name="box" shape="cube" location=(0,0,0.5) color=(0.8,0.2,0.2)
add_primitive name="ball" shape="sphere" location=(1.5,0.5,0.4) scale=(0.8,0.8,0.8)
add_light name="sun" kind="sun" direction=(-0.4,-0.3,-1) energy=2.5
add_camera name="Camera" location=(5,-5,4) look_at=(0,0,0.4)
)";

// One scripted three-round episode, embedded engine, no trajectory on disk.
void BM_ReplayEpisode(benchmark::State& state) {
    const std::filesystem::path dir = std::filesystem::path(SCENELOOP_FIXTURES) / "golden_replay";
    const auto task = bench::make_episode_task(bench::load_task(dir / "task.json"));
    const auto script = backend::ReplayScript::load(dir / "replay.json");
    agent::EpisodeConfig cfg;
    cfg.render.width = cfg.render.height = static_cast<int>(state.range(0));
    for (auto _ : state) {
        backend::ReplayBackend backend(script);
        engine::EmbeddedEngine engine;
        agent::EpisodeDeps deps{backend, engine, nullptr, nullptr, nullptr, nullptr, {}};
        benchmark::DoNotOptimize(agent::run_episode(task, cfg, deps));
    }
}
BENCHMARK(BM_ReplayEpisode)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void engine_round(engine::Engine& e, int size) {
    e.reset();
    benchmark::DoNotOptimize(e.execute_program(kScene, engine::kLanguageScn));
    benchmark::DoNotOptimize(e.render(std::nullopt, {size, size}));
    benchmark::DoNotOptimize(e.list_bounds({}, std::nullopt));
}

void BM_EngineEmbedded(benchmark::State& state) {
    engine::EmbeddedEngine e;
    for (auto _ : state) engine_round(e, static_cast<int>(state.range(0)));
}
BENCHMARK(BM_EngineEmbedded)->Arg(64)->Arg(256);

// Same calls through the line protocol to a child process.
void BM_EngineProtocol(benchmark::State& state) {
    protocol::RemoteEngine e(protocol::spawn_sidecar({SCENELOOP_ENGINE_BIN}));
    for (auto _ : state) engine_round(e, static_cast<int>(state.range(0)));
    e.shutdown();
}
BENCHMARK(BM_EngineProtocol)->Arg(64)->Arg(256);

} // namespace

BENCHMARK_MAIN();
