#include "sceneloop/bench/report.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace sceneloop;
using bench::TaskKind;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bench::SuiteConfig replay_config(int jobs) {
    bench::SuiteConfig c;
    c.episode.render.width = c.episode.render.height = 64;
    c.backends = bench::replay_backend_factory();
    c.engines = bench::embedded_engine_factory();
    c.embedder = std::make_shared<metrics::FallbackEmbedder>();
    c.judge = std::make_shared<metrics::StubJudge>();
    c.jobs = jobs;
    c.snapshot = {{"render", {64, 64}}};
    return c;
}

json minimal_task() {
    return {{"schema_version", 1},
            {"id", "x"},
            {"kind", "reconstruct"},
            {"instruction", "do it"},
            {"target_images", {"t.png"}}};
}

std::string pointer_of(const json& j) {
    try {
        bench::parse_task(j, "/base");
    } catch (const bench::FormatError& e) {
        return e.pointer();
    }
    return "<accepted>";
}

} // namespace

TEST_CASE("six-task suite: per-row metrics, kind aggregates and a failure row") {
    const auto suite = testing::fixture_path("suite");
    auto result = bench::run_suite(suite, replay_config(2));
    CHECK(result.name == "mini");
    REQUIRE(result.rows.size() == 6);
    CHECK(result.rows[0].id == "camera-a");
    CHECK(result.rows[5].id == "compose-b");

    for (int i = 0; i < 5; ++i) {
        CAPTURE(result.rows[i].id);
        CHECK(result.rows[i].completed);
        REQUIRE(result.rows[i].report.pl);
        CHECK(*result.rows[i].report.pl == 0.0);
        CHECK(result.rows[i].report.n_clip == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK_FALSE(result.rows[5].completed);
    CHECK(result.rows[5].failure.find("no successful round") != std::string::npos);

    REQUIRE(result.aggregates.size() == 3);
    CHECK(result.aggregates[0].kind == TaskKind::camera_adjust);
    CHECK(result.aggregates[1].kind == TaskKind::edit);
    CHECK(result.aggregates[2].kind == TaskKind::compositional);
    CHECK(result.aggregates[2].completed == 1);
    CHECK(result.aggregates[2].failed == 1);
    CHECK(result.aggregates[0].mean_pl == 0.0);
    CHECK_FALSE(result.aggregates[0].mean_vlm);
}

TEST_CASE("suite report files are byte-identical across runs and job counts") {
    const auto suite = testing::fixture_path("suite");
    testing::TempDir a, b;
    bench::write_report(bench::run_suite(suite, replay_config(1)), a.path());
    bench::write_report(bench::run_suite(suite, replay_config(3)), b.path());
    for (const char* f : {"results.json", "results.txt", "report.html"}) {
        CAPTURE(f);
        CHECK(agent::read_text_file(a / f) == agent::read_text_file(b / f));
    }
    auto j = json::parse(agent::read_text_file(a / "results.json"));
    CHECK(j["rows"].size() == 6);
    CHECK(j["rows"][5]["completed"] == false);
    CHECK(j["aggregates"].size() == 3);
    const std::string html = agent::read_text_file(a / "report.html");
    std::size_t rows = 0;
    for (auto p = html.find("class=\"task-row"); p != std::string::npos; p = html.find("class=\"task-row", p + 1))
        ++rows;
    CHECK(rows == 6);
    CHECK(agent::read_text_file(a / "results.txt").find("compose-b") != std::string::npos);
}

TEST_CASE("a task file that does not load becomes a failure row") {
    testing::TempDir dir;
    agent::write_text_file(dir / "suite.json",
                           R"({"schema_version": 1, "name": "broken", "tasks": ["missing.json", "bad.json"]})");
    agent::write_text_file(dir / "bad.json", R"({"schema_version": 1, "id": "bad", "kind": "sculpt"})");
    auto result = bench::run_suite(dir.path(), replay_config(1));
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].id == "missing");
    CHECK_FALSE(result.rows[0].kind);
    CHECK_FALSE(result.rows[1].completed);
    CHECK(result.rows[1].failure.find("/kind") != std::string::npos);
    CHECK(result.aggregates.empty());
}

TEST_CASE("task schema errors name the offending field") {
    CHECK(pointer_of(minimal_task()) == "<accepted>");
    auto j = minimal_task();
    j["colour"] = "red";
    CHECK(pointer_of(j) == "/colour");
    j = minimal_task();
    j["schema_version"] = 2;
    CHECK(pointer_of(j) == "/schema_version");
    j = minimal_task();
    j["target_images"] = json::array();
    CHECK(pointer_of(j) == "/target_images");
    j = minimal_task();
    j["target_images"] = {"a.png", 3};
    CHECK(pointer_of(j) == "/target_images/1");
    j = minimal_task();
    j["initial_program"] = "p.scn";
    CHECK(pointer_of(j) == "/initial_program");
    j = minimal_task();
    j["kind"] = "edit";
    CHECK(pointer_of(j) == "/initial_program");
    j = minimal_task();
    j["metrics"] = {"pl", "fid"};
    CHECK(pointer_of(j) == "/metrics/1");
    j = minimal_task();
    j.erase("instruction");
    CHECK(pointer_of(j) == "/instruction");
}

TEST_CASE("task paths resolve against the task file and survive a JSON round trip") {
    auto t = bench::parse_task(minimal_task(), "/base/dir");
    REQUIRE(t.target_images.size() == 1);
    CHECK(t.target_images[0] == fs::path("/base/dir/t.png"));
    CHECK(t.metrics.pl);
    CHECK(t.metrics.n_clip);
    CHECK_FALSE(t.metrics.vlm);
    auto again = bench::parse_task(bench::task_to_json(t), "/elsewhere");
    CHECK(again.target_images == t.target_images);
    CHECK(again.kind == t.kind);
}

TEST_CASE("vlm scores come from the judge only when a task asks for them") {
    auto task = bench::load_task(testing::fixture_path("e2e_edit/task.json"));
    auto cfg = replay_config(1);
    auto row = bench::run_task(task, cfg);
    REQUIRE(row.completed);
    CHECK_FALSE(row.report.vlm_score);
    task.metrics.vlm = true;
    row = bench::run_task(task, cfg);
    REQUIRE(row.report.vlm_score);
    CHECK(*row.report.vlm_score == 5.0);
}

TEST_CASE("re-scoring a written trajectory reproduces the stored metrics") {
    auto task = bench::load_task(testing::fixture_path("e2e_edit/task.json"));
    testing::TempDir dir;
    auto cfg = replay_config(1);
    cfg.trajectory_root = dir.path();
    auto row = bench::run_task(task, cfg);
    REQUIRE(row.completed);
    std::vector<scene::Image> targets{scene::read_png(task.target_images[0])};
    metrics::FallbackEmbedder embedder;
    auto score = bench::rescore_trajectory(dir / "e2e-edit", targets, embedder);
    CHECK(score.rounds.size() == 3);
    CHECK(score.all_match);
    auto wrong = bench::rescore_trajectory(dir / "e2e-edit", {testing::solid(64, 64, 255, 255, 255)}, embedder);
    CHECK_FALSE(wrong.all_match);
}
