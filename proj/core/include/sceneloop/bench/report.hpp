#pragma once

#include "sceneloop/bench/suite.hpp"

namespace sceneloop::bench {

json suite_to_json(const SuiteResult& result);
std::string suite_to_text(const SuiteResult& result);
// Static page with target and final render side by side per task.
std::string suite_to_html(const SuiteResult& result);

// results.json, results.txt and report.html under `out_dir`.
void write_report(const SuiteResult& result, const fs::path& out_dir);

struct RoundScore {
    int episode = 0;
    int round = 0;
    metrics::MetricReport recomputed;
    std::optional<metrics::MetricReport> stored;  // from summary.json
    bool matches = false;
};

struct TrajectoryScore {
    std::vector<RoundScore> rounds;
    bool all_match = true;
    json to_json() const;
};

// Re-scores every successful round's render-0.png under a trajectory
// directory (episode-<k>/ children) against `targets`.
TrajectoryScore rescore_trajectory(const fs::path& root, const std::vector<scene::Image>& targets,
                                   metrics::Embedder& embedder);

} // namespace sceneloop::bench
