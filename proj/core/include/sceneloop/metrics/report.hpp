#pragma once

#include "sceneloop/metrics/embedder.hpp"
#include "sceneloop/metrics/judge.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>

namespace sceneloop::metrics {

using nlohmann::json;

struct ImageMetrics {
    double pl = 0;
    double n_clip = 0;
    std::optional<double> vlm_score;
};

// Averages over targets; per_image keeps the breakdown. A metric that was not
// computed stays empty.
struct MetricReport {
    std::optional<double> pl;
    std::optional<double> n_clip;
    std::optional<double> vlm_score;
    std::vector<ImageMetrics> per_image;
    std::vector<std::string> warnings;

    json to_json() const;
    static MetricReport from_json(const json& j);
};

struct MetricSelection {
    bool pl = true;
    bool n_clip = true;
    bool vlm = false;
};

// `judge` may be null (vlm_score stays empty).
MetricReport evaluate(const scene::Image& result, const std::vector<scene::Image>& targets, Embedder& embedder,
                      Judge* judge = nullptr, const std::string& instruction = {}, MetricSelection which = {});

class MismatchError : public Error {
public:
    using Error::Error;
};

struct ImprovementEntry {
    std::string task;
    std::string metric;  // pl | n_clip | vlm_score
    double baseline = 0;
    double ours = 0;
    std::optional<double> pct;  // empty when the baseline is 0
};

struct ImprovementTable {
    std::vector<ImprovementEntry> entries;
    std::map<std::string, double> task_mean;  // over defined entries
    std::optional<double> aggregate;          // mean of task means
    std::vector<std::string> excluded;        // "task/metric" with baseline 0

    json to_json() const;
    std::string to_text() const;
};

// Lower-better PL and N-CLIP use 100*(b-o)/b, higher-better VLM score uses
// 100*(o-b)/b. Metrics present in only one report are skipped.
ImprovementTable improvement_pct(const std::map<std::string, MetricReport>& baseline,
                                 const std::map<std::string, MetricReport>& ours);

// Left-aligned first column, right-aligned others, two-space gutters.
std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

} // namespace sceneloop::metrics
