#pragma once

#include "sceneloop/memory/memory.hpp"
#include "sceneloop/metrics/report.hpp"

#include <filesystem>
#include <mutex>

namespace sceneloop::agent {

using nlohmann::json;

enum class TerminalReason { end_process, budget_exhausted, error };

std::string_view to_string(TerminalReason r);

struct Trajectory {
    int episode = 0;
    std::int64_t seed = 0;
    std::string task_id;
    std::vector<memory::RoundRecord> rounds;
    // Metrics of each round's exec render against the targets (success only).
    std::vector<std::optional<metrics::MetricReport>> round_metrics;
    std::optional<TerminalReason> reason;
    std::optional<std::string> error;
    // Events of the final, unexecuted generator turn sequence (end_process).
    std::vector<memory::ToolEvent> trailing_events;
    std::string final_program;

    // Everything except wall-clock time, which summary.json keeps apart.
    json summary_json() const;
};

struct Candidate {
    int episode = 0;
    int round = 0;
    scene::Image render;
    std::string program;
    double score = 0;  // cosine similarity to the target
};

// Writes episode-<k>/round-<t>/{generator.json, program.scn, diff.txt,
// exec.json, render-<i>.png, verifier.json, feedback.json},
// episode-<k>/summary.json and selection.json under one root. render-0.png
// is the execution render; verifier renders follow in event order.
// verifier.json exists only for rounds that reached the verifier.
class TrajectoryWriter {
public:
    explicit TrajectoryWriter(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path round_dir(int episode, int round) const;

    void write_round(int episode, const memory::RoundRecord& round, const std::optional<metrics::MetricReport>& m);
    void write_summary(const Trajectory& t, double wall_seconds);
    void write_selection(const Candidate& c, const std::string& embedder_name);

private:
    std::filesystem::path root_;
    std::mutex mutex_;
};

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);
// Stable pretty JSON with a trailing newline.
std::string dump_json(const json& j);

} // namespace sceneloop::agent
