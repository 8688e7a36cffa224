#include "cli.hpp"

#include "sceneloop/backend/embedder.hpp"
#include "sceneloop/backend/openai.hpp"
#include "sceneloop/bench/report.hpp"
#include "sceneloop/engine/embedded_engine.hpp"
#include "sceneloop/scene/animation.hpp"
#include "sceneloop/scene/interpreter.hpp"
#include "sceneloop/scene/render.hpp"
#include "sceneloop/tools/registry.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>

namespace sceneloop::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flags shared by `run` and `bench`.
struct EpisodeFlags {
    int max_rounds = 10;
    int context_window = memory::kDefaultWindow;
    int image_cap = memory::kDefaultImageCap;
    int verifier_budget = 8;
    int best_of = 1;
    std::int64_t seed = 0;
    int episode_jobs = 1;
    int width = 256;
    int height = 256;
    std::string backend = "auto";
    std::string engine = "embedded";
    std::string engine_command;
    std::string endpoint;
    std::string model;
    std::string api_key;
    bool text_tools = false;
    std::string embedder = "fallback";
    std::string embedder_endpoint;
    std::string embedder_model;
    std::string judge = "stub";
    bool verbose = false;

    void add(CLI::App& app) {
        app.add_option("--max-rounds", max_rounds, "Rounds per episode")
            ->envname("SCENELOOP_MAX_ROUNDS")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--context-window", context_window, "Rounds kept in the model's context")
            ->envname("SCENELOOP_CONTEXT_WINDOW")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--image-cap", image_cap, "Round renders kept in the generator context")
            ->envname("SCENELOOP_IMAGE_CAP")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app.add_option("--verifier-budget", verifier_budget, "Verifier tool turns per round")
            ->envname("SCENELOOP_VERIFIER_BUDGET")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--best-of", best_of, "Independent episodes per task")
            ->envname("SCENELOOP_BEST_OF")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--seed", seed, "Base seed; episode i uses seed+i")->envname("SCENELOOP_SEED")->capture_default_str();
        app.add_option("--episode-jobs", episode_jobs, "Episodes of one task run at once")
            ->envname("SCENELOOP_EPISODE_JOBS")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--width", width, "Render width")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--height", height, "Render height")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--backend", backend, "Model backend: replay, openai, or auto (replay when the task has a script)")
            ->envname("SCENELOOP_BACKEND")
            ->check(CLI::IsMember({"auto", "replay", "openai"}))
            ->capture_default_str();
        app.add_option("--engine", engine, "embedded (in-process) or subprocess")
            ->envname("SCENELOOP_ENGINE")
            ->check(CLI::IsMember({"embedded", "subprocess"}))
            ->capture_default_str();
        app.add_option("--engine-command", engine_command, "Command line of the subprocess engine")
            ->envname("SCENELOOP_ENGINE_COMMAND");
        app.add_option("--endpoint", endpoint, "Chat completions base URL")->envname("SCENELOOP_ENDPOINT");
        app.add_option("--model", model, "Model name sent to the endpoint")->envname("SCENELOOP_MODEL");
        app.add_option("--api-key", api_key, "Credential for the endpoint")->envname("SCENELOOP_API_KEY");
        app.add_flag("--text-tools", text_tools, "Describe tools in the prompt and parse calls from reply text")
            ->envname("SCENELOOP_TEXT_TOOLS");
        app.add_option("--embedder", embedder, "Image embedder: fallback or http")
            ->envname("SCENELOOP_EMBEDDER")
            ->check(CLI::IsMember({"fallback", "http"}))
            ->capture_default_str();
        app.add_option("--embedder-endpoint", embedder_endpoint, "Embeddings URL for --embedder http")
            ->envname("SCENELOOP_EMBEDDER_ENDPOINT");
        app.add_option("--embedder-model", embedder_model, "Embedding model for --embedder http")
            ->envname("SCENELOOP_EMBEDDER_MODEL");
        app.add_option("--judge", judge, "VLM score judge: stub (PL thresholds) or backend")
            ->envname("SCENELOOP_JUDGE")
            ->check(CLI::IsMember({"stub", "backend"}))
            ->capture_default_str();
        app.add_flag("-v,--verbose", verbose, "Log progress to stderr");
    }

    agent::EpisodeConfig episode_config() const {
        agent::EpisodeConfig c;
        c.max_rounds = max_rounds;
        c.window = context_window;
        c.image_cap = image_cap;
        c.verifier_budget = verifier_budget;
        c.best_of = best_of;
        c.seed = seed;
        c.jobs = episode_jobs;
        c.render.width = width;
        c.render.height = height;
        return c;
    }

    std::shared_ptr<backend::Backend> openai_backend(agent::Log log) const {
        backend::BackendProfile p = backend::BackendProfile::from_env();
        if (!endpoint.empty()) p.endpoint = endpoint;
        if (!model.empty()) p.model = model;
        if (!api_key.empty()) p.api_key = api_key;
        p.native_tool_calls = !text_tools;
        p.seed = seed;
        if (p.endpoint.empty()) throw Error("--backend openai needs --endpoint (or SCENELOOP_ENDPOINT)");
        return std::make_shared<backend::OpenAIBackend>(p, nullptr, verbose ? log : nullptr);
    }

    bench::SuiteConfig suite_config(agent::Log log) const {
        bench::SuiteConfig c;
        c.episode = episode_config();
        c.log = verbose ? log : nullptr;
        std::shared_ptr<backend::Backend> live;
        if (backend == "openai") live = openai_backend(log);
        if (live) {
            c.backends = bench::shared_backend_factory(live);
        } else if (backend == "replay") {
            c.backends = bench::replay_backend_factory();
        } else {
            auto replay = bench::replay_backend_factory();
            auto self = *this;
            auto lazy = std::make_shared<std::shared_ptr<backend::Backend>>();
            auto mutex = std::make_shared<std::mutex>();
            c.backends = [replay, self, log, lazy, mutex](const bench::TaskInstance& t, int k) {
                if (t.replay) return replay(t, k);
                std::lock_guard lock(*mutex);
                if (!*lazy) *lazy = self.openai_backend(log);
                return *lazy;
            };
        }
        if (engine == "subprocess") {
            if (engine_command.empty()) throw Error("--engine subprocess needs --engine-command");
            std::vector<std::string> argv;
            std::istringstream words(engine_command);
            for (std::string w; words >> w;) argv.push_back(w);
            c.engines = bench::subprocess_engine_factory(argv);
        } else {
            c.engines = bench::embedded_engine_factory();
        }
        if (embedder == "http") {
            if (embedder_endpoint.empty()) throw Error("--embedder http needs --embedder-endpoint");
            c.embedder = std::make_shared<backend::HttpEmbedder>(embedder_endpoint, embedder_model, api_key);
        } else {
            c.embedder = std::make_shared<metrics::FallbackEmbedder>();
        }
        if (judge == "backend") {
            if (!live) live = openai_backend(log);
            c.judge = std::make_shared<metrics::BackendJudge>(*live);
            keepalive_ = live;
        } else {
            c.judge = std::make_shared<metrics::StubJudge>();
        }
        c.snapshot = {{"max_rounds", max_rounds},  {"context_window", context_window}, {"image_cap", image_cap},
                      {"verifier_budget", verifier_budget}, {"best_of", best_of}, {"seed", seed},
                      {"backend", backend},        {"engine", engine},               {"embedder", c.embedder->name()},
                      {"judge", c.judge->name()},  {"render", {width, height}}};
        return c;
    }

    mutable std::shared_ptr<backend::Backend> keepalive_;
};

agent::Log stderr_log(std::ostream& err) {
    auto mutex = std::make_shared<std::mutex>();
    return [&err, mutex](const std::string& s) {
        std::lock_guard lock(*mutex);
        err << s << "\n";
    };
}

std::string metric_text(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "-"; }

scene::Vec3 parse_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

int cmd_run(const EpisodeFlags& flags, const fs::path& task_path, const fs::path& out, std::ostream& os,
            std::ostream& err) {
    bench::TaskInstance task = bench::load_task(task_path);
    bench::SuiteConfig config = flags.suite_config(stderr_log(err));
    config.trajectory_root = out;
    bench::SuiteResult result;
    result.name = task.id;
    result.config = config.snapshot;
    result.rows.push_back(bench::run_task(task, config));
    result.aggregates = bench::aggregate_rows(result.rows);
    bench::write_report(result, out);
    const bench::TaskRow& row = result.rows.front();
    if (!row.completed) {
        err << "task " << row.id << " failed: " << row.failure << "\n";
        return 1;
    }
    os << fmt::format("{}: episode {} round {} score {:.4f} pl {} n_clip {}\n", row.id, row.episode, row.round,
                      row.score, metric_text(row.report.pl), metric_text(row.report.n_clip));
    for (const std::string& f : result.rows.front().report.warnings) os << "warning: " << f << "\n";
    return 0;
}

int cmd_bench(const EpisodeFlags& flags, const fs::path& suite_dir, const fs::path& out, int jobs, std::ostream& os,
              std::ostream& err) {
    bench::SuiteConfig config = flags.suite_config(stderr_log(err));
    config.jobs = jobs;
    config.trajectory_root = out / "trajectories";
    config.snapshot["jobs"] = jobs;
    bench::SuiteResult result = bench::run_suite(suite_dir, config);
    bench::write_report(result, out);
    os << bench::suite_to_text(result);
    return 0;
}

int cmd_eval(const fs::path& dir, const std::optional<fs::path>& task_path, const std::vector<fs::path>& target_paths,
             bool check, std::ostream& os) {
    std::vector<scene::Image> targets;
    if (task_path) {
        for (const auto& p : bench::load_task(*task_path).target_images) targets.push_back(scene::read_png(p));
    }
    for (const auto& p : target_paths) targets.push_back(scene::read_png(p));
    if (targets.empty()) throw Error("eval needs --task or --target");
    metrics::FallbackEmbedder embedder;
    bench::TrajectoryScore score = bench::rescore_trajectory(dir, targets, embedder);
    os << agent::dump_json(score.to_json());
    if (check && !score.all_match) {
        for (const auto& r : score.rounds) {
            if (!r.matches) os << fmt::format("mismatch: episode {} round {}\n", r.episode, r.round);
        }
        return 1;
    }
    return 0;
}

struct RenderFlags {
    fs::path script;
    fs::path out;
    std::vector<double> location;
    std::vector<double> rotation;
    std::vector<double> look_at;
    std::optional<double> fov_deg;
    int width = 256;
    int height = 256;
    std::optional<int> frame;
};

int cmd_render(const RenderFlags& f, std::ostream& os) {
    scene::ExecOptions opts;
    opts.asset_root = f.script.has_parent_path() ? f.script.parent_path() : fs::path(".");
    scene::SceneState state = scene::execute_source(agent::read_text_file(f.script), opts);
    if (f.frame) state.current_frame = *f.frame;
    scene::CameraPose cam;
    if (const scene::CameraPose* active = state.active_camera_pose()) cam = *active;
    else if (f.location.empty()) throw Error("the script has no active camera; pass --location");
    if (!f.location.empty()) cam.location = parse_vec3(f.location);
    if (!f.rotation.empty()) cam.rotation_euler = parse_vec3(f.rotation);
    if (!f.look_at.empty()) cam.rotation_euler = scene::look_at_euler(cam.location, parse_vec3(f.look_at));
    if (f.fov_deg) cam.fov_y = scene::radians(*f.fov_deg);
    scene::RenderConfig rc;
    rc.width = f.width;
    rc.height = f.height;
    scene::write_png(f.out, scene::render(state, cam, rc));
    os << f.out.string() << "\n";
    return 0;
}

int cmd_tools(const std::string& phase, std::ostream& os) {
    if (phase.empty()) os << agent::dump_json(tools::export_schemas());
    else os << agent::dump_json(tools::phase_schemas(tools::phase_from_string(phase)));
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generator/verifier scene agent"};
    app.name("sceneloop");
    app.require_subcommand(1);

    EpisodeFlags flags;

    auto* run_cmd = app.add_subcommand("run", "Run one task and write its trajectory");
    fs::path task_path;
    fs::path run_out = "sceneloop-out";
    run_cmd->add_option("--task", task_path, "Task file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run_out, "Output directory")->envname("SCENELOOP_OUT")->capture_default_str();
    flags.add(*run_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "Run a suite of tasks and write a report");
    fs::path suite_dir;
    fs::path bench_out = "sceneloop-bench";
    int jobs = 1;
    bench_cmd->add_option("suite", suite_dir, "Suite directory containing suite.json")
        ->required()
        ->check(CLI::ExistingDirectory);
    bench_cmd->add_option("--out", bench_out, "Report directory")->envname("SCENELOOP_OUT")->capture_default_str();
    bench_cmd->add_option("--jobs", jobs, "Tasks run at once")
        ->envname("SCENELOOP_JOBS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    flags.add(*bench_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "Re-score a written trajectory");
    fs::path traj_dir;
    std::optional<fs::path> eval_task;
    std::vector<fs::path> eval_targets;
    bool check = false;
    eval_cmd->add_option("trajectory", traj_dir, "Trajectory directory")->required()->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--task", eval_task, "Task file supplying the targets")->check(CLI::ExistingFile);
    eval_cmd->add_option("--target", eval_targets, "Target PNG (repeatable)")->check(CLI::ExistingFile);
    eval_cmd->add_flag("--check", check, "Exit 1 when recomputed metrics differ from the stored ones");

    auto* render_cmd = app.add_subcommand("render", "Render a scene program to PNG");
    RenderFlags rf;
    render_cmd->add_option("--script", rf.script, "Scene program")->required()->check(CLI::ExistingFile);
    render_cmd->add_option("--out", rf.out, "Output PNG")->required();
    render_cmd->add_option("--location", rf.location, "Camera location x y z")->expected(3);
    render_cmd->add_option("--rotation", rf.rotation, "Camera euler angles in radians")->expected(3);
    render_cmd->add_option("--look-at", rf.look_at, "Point the camera at x y z")->expected(3);
    render_cmd->add_option("--fov", rf.fov_deg, "Vertical field of view in degrees")->check(CLI::Range(1.0, 179.0));
    render_cmd->add_option("--width", rf.width, "Width")->check(CLI::PositiveNumber)->capture_default_str();
    render_cmd->add_option("--height", rf.height, "Height")->check(CLI::PositiveNumber)->capture_default_str();
    render_cmd->add_option("--frame", rf.frame, "Animation frame");

    auto* tools_cmd = app.add_subcommand("tools", "Print the tool schemas as JSON");
    std::string phase;
    tools_cmd->add_option("--phase", phase, "generation or verification")
        ->check(CLI::IsMember({"generation", "verification"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front())
            err << "run `" << sub->get_name() << " --help` for usage\n";
        return 2;
    }

    try {
        if (*run_cmd) return cmd_run(flags, task_path, run_out, out, err);
        if (*bench_cmd) return cmd_bench(flags, suite_dir, bench_out, jobs, out, err);
        if (*eval_cmd) return cmd_eval(traj_dir, eval_task, eval_targets, check, out);
        if (*render_cmd) return cmd_render(rf, out);
        if (*tools_cmd) return cmd_tools(phase, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace sceneloop::cli
