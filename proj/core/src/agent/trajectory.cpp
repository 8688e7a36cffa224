#include "sceneloop/agent/trajectory.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace sceneloop::agent {

namespace fs = std::filesystem;
using memory::ToolEvent;

std::string_view to_string(TerminalReason r) {
    switch (r) {
    case TerminalReason::end_process: return "end_process";
    case TerminalReason::budget_exhausted: return "budget_exhausted";
    case TerminalReason::error: return "error";
    }
    return "error";
}

void write_text_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

namespace {

// Event JSON with image payloads replaced by render file names.
json events_json(const std::vector<ToolEvent>& events, tools::Phase phase, int& next_render,
                 std::vector<std::pair<std::string, const scene::Image*>>& files) {
    json arr = json::array();
    for (const ToolEvent& e : events) {
        if (e.phase != phase) continue;
        json j = memory::event_to_json(e, false);
        if (e.kind == ToolEvent::Kind::call) {
            json names = json::array();
            for (const auto& img : e.result.images) {
                const std::string name = fmt::format("render-{}.png", next_render++);
                files.emplace_back(name, &img);
                names.push_back(name);
            }
            j["result"]["images"] = std::move(names);
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

bool has_phase(const std::vector<ToolEvent>& events, tools::Phase p) {
    for (const auto& e : events)
        if (e.phase == p) return true;
    return false;
}

} // namespace

json Trajectory::summary_json() const {
    json rounds_json = json::array();
    for (size_t i = 0; i < rounds.size(); ++i) {
        const auto& r = rounds[i];
        json m = i < round_metrics.size() && round_metrics[i] ? round_metrics[i]->to_json() : json(nullptr);
        rounds_json.push_back({{"round", r.index},
                               {"success", r.exec.success},
                               {"error_line", r.exec.error_line ? json(*r.exec.error_line) : json(nullptr)},
                               {"feedback_substituted", r.feedback_substituted},
                               {"metrics", std::move(m)}});
    }
    json trailing = json::array();
    for (const auto& e : trailing_events) trailing.push_back(memory::event_to_json(e, false));
    return {{"episode", episode},
            {"seed", seed},
            {"task", task_id},
            {"round_count", rounds.size()},
            {"rounds", std::move(rounds_json)},
            {"terminal_reason", reason ? json(to_string(*reason)) : json(nullptr)},
            {"error", error ? json(*error) : json(nullptr)},
            {"final_program", final_program},
            {"trailing_events", std::move(trailing)}};
}

TrajectoryWriter::TrajectoryWriter(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path TrajectoryWriter::round_dir(int episode, int round) const {
    return root_ / fmt::format("episode-{}", episode) / fmt::format("round-{}", round);
}

void TrajectoryWriter::write_round(int episode, const memory::RoundRecord& round,
                                   const std::optional<metrics::MetricReport>& m) {
    std::lock_guard lock(mutex_);
    const fs::path dir = round_dir(episode, round.index);
    fs::create_directories(dir);

    std::vector<std::pair<std::string, const scene::Image*>> files;
    json render_names = json::array();
    for (size_t i = 0; i < round.exec.renders.size(); ++i) {
        const std::string name = fmt::format("render-{}.png", i);
        files.emplace_back(name, &round.exec.renders[i]);
        render_names.push_back(name);
    }
    int next_render = static_cast<int>(round.exec.renders.size());

    const json gen = {{"round", round.index},
                      {"events", events_json(round.events, tools::Phase::generation, next_render, files)}};
    write_text_file(dir / "generator.json", dump_json(gen));
    if (has_phase(round.events, tools::Phase::verification)) {
        const json ver = {{"round", round.index},
                          {"events", events_json(round.events, tools::Phase::verification, next_render, files)}};
        write_text_file(dir / "verifier.json", dump_json(ver));
    }
    write_text_file(dir / "program.scn", round.program);
    write_text_file(dir / "diff.txt", round.diff_text);
    const json exec = {{"success", round.exec.success},
                       {"text", round.exec.text},
                       {"error_line", round.exec.error_line ? json(*round.exec.error_line) : json(nullptr)},
                       {"thought", round.thought},
                       {"renders", std::move(render_names)},
                       {"metrics", m ? m->to_json() : json(nullptr)}};
    write_text_file(dir / "exec.json", dump_json(exec));
    const json fb = {{"visual_difference", round.feedback.visual_difference},
                     {"edit_suggestion", round.feedback.edit_suggestion},
                     {"substituted", round.feedback_substituted}};
    write_text_file(dir / "feedback.json", dump_json(fb));
    for (const auto& [name, img] : files) scene::write_png(dir / name, *img);
}

void TrajectoryWriter::write_summary(const Trajectory& t, double wall_seconds) {
    std::lock_guard lock(mutex_);
    const fs::path dir = root_ / fmt::format("episode-{}", t.episode);
    fs::create_directories(dir);
    json j = t.summary_json();
    j["wall_clock"] = {{"seconds", wall_seconds}};
    write_text_file(dir / "summary.json", dump_json(j));
}

void TrajectoryWriter::write_selection(const Candidate& c, const std::string& embedder_name) {
    std::lock_guard lock(mutex_);
    const json j = {{"episode", c.episode},
                    {"round", c.round},
                    {"score", c.score},
                    {"embedder", embedder_name},
                    {"render", fmt::format("episode-{}/round-{}/render-0.png", c.episode, c.round)},
                    {"program", c.program}};
    write_text_file(root_ / "selection.json", dump_json(j));
}

} // namespace sceneloop::agent
