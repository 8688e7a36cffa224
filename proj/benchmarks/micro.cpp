#include "sceneloop/memory/assemble.hpp"
#include "sceneloop/metrics/embedder.hpp"
#include "sceneloop/scene/interpreter.hpp"
#include "sceneloop/scene/render.hpp"
#include "sceneloop/tools/diff.hpp"

#include <benchmark/benchmark.h>
#include <fmt/format.h>

using namespace sceneloop;

namespace {

std::string grid_scene(int n) {
    std::string src = "set_background color=(0.05,0.05,0.05) ambient=0.3\n"
                      "add_primitive name=\"floor\" shape=\"plane\" scale=(20,20,1)\n";
    const char* shapes[] = {"cube", "sphere", "cylinder", "cone"};
    for (int i = 0; i < n; ++i)
        src += fmt::format("add_primitive name=\"o{}\" shape=\"{}\" location=({},{},0.5) scale=(0.6,0.6,0.6) "
                           "color=(0.{},0.4,0.6)\n",
                           i, shapes[i % 4], (i % 8) - 4, (i / 8) - 4, i % 10);
    src += "add_light name=\"sun\" kind=\"sun\" direction=(-0.4,-0.3,-1) energy=2.5\n"
           "add_camera name=\"Camera\" location=(10,-10,8) look_at=(0,0,0)\n";
    return src;
}

void BM_ExecuteProgram(benchmark::State& state) {
    const std::string src = grid_scene(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(scene::execute_source(src));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExecuteProgram)->Arg(8)->Arg(64);

void BM_Render(benchmark::State& state) {
    const auto world = scene::execute_source(grid_scene(32));
    const int size = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(scene::render(world, *world.active_camera_pose(), {size, size}));
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_Render)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DiffRoundTrip(benchmark::State& state) {
    const std::string before = grid_scene(static_cast<int>(state.range(0)));
    std::string after = before;
    after.replace(after.find("o3"), 2, "renamed");
    after += "add_primitive name=\"extra\" shape=\"cube\"\n";
    for (auto _ : state) {
        auto d = tools::make_diff(before, after);
        benchmark::DoNotOptimize(tools::apply_diff(before, tools::parse_code_diff(tools::format_code_diff(d))));
    }
}
BENCHMARK(BM_DiffRoundTrip)->Arg(16)->Arg(128);

void BM_Metrics(benchmark::State& state) {
    const auto world = scene::execute_source(grid_scene(16));
    const auto a = scene::render(world, *world.active_camera_pose(), {256, 256});
    auto cam = *world.active_camera_pose();
    cam.location.x() += 0.5;
    const auto b = scene::render(world, cam, {256, 256});
    metrics::FallbackEmbedder embedder;
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::photometric_loss(a, b));
        benchmark::DoNotOptimize(metrics::n_clip(a, b, embedder));
    }
}
BENCHMARK(BM_Metrics);

void BM_AssembleContext(benchmark::State& state) {
    memory::ContextMemory m(static_cast<int>(state.range(0)));
    m.pinned().task = "task";
    for (int i = 0; i < 100; ++i) {
        auto& r = m.open_round();
        r.program = grid_scene(8);
        r.exec.success = true;
        r.exec.renders.push_back(scene::Image(64, 64));
        r.feedback = {"difference", "suggestion"};
        m.commit_round();
    }
    for (auto _ : state) benchmark::DoNotOptimize(memory::assemble_generator_context(m));
}
BENCHMARK(BM_AssembleContext)->Arg(4)->Arg(12);

} // namespace
