#include "sceneloop/metrics/report.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace sceneloop::metrics {

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
}

} // namespace

json MetricReport::to_json() const {
    json per = json::array();
    for (const auto& m : per_image) per.push_back({{"pl", m.pl}, {"n_clip", m.n_clip}, {"vlm_score", opt(m.vlm_score)}});
    return {{"pl", opt(pl)},
            {"n_clip", opt(n_clip)},
            {"vlm_score", opt(vlm_score)},
            {"per_image", std::move(per)},
            {"warnings", warnings},
            {"resampling", "bilinear to 256x256 when sizes differ"}};
}

MetricReport MetricReport::from_json(const json& j) {
    MetricReport r;
    r.pl = opt_from(j, "pl");
    r.n_clip = opt_from(j, "n_clip");
    r.vlm_score = opt_from(j, "vlm_score");
    for (const auto& m : j.value("per_image", json::array()))
        r.per_image.push_back({m.at("pl").get<double>(), m.at("n_clip").get<double>(), opt_from(m, "vlm_score")});
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
}

MetricReport evaluate(const scene::Image& result, const std::vector<scene::Image>& targets, Embedder& embedder,
                      Judge* judge, const std::string& instruction, MetricSelection which) {
    if (targets.empty()) throw Error("evaluation needs at least one target image");
    MetricReport r;
    const auto result_embedding = which.n_clip ? embedder.embed(result) : std::vector<double>{};
    double pl_sum = 0, clip_sum = 0, vlm_sum = 0;
    bool vlm_ok = which.vlm && judge;
    for (const auto& t : targets) {
        ImageMetrics m;
        if (which.pl) m.pl = photometric_loss(result, t);
        if (which.n_clip) m.n_clip = n_clip_from_embeddings(result_embedding, embedder.embed(t));
        if (vlm_ok) {
            try {
                JudgeResult j = judge->score(t, result, instruction);
                m.vlm_score = j.score;
                for (auto& w : j.warnings) r.warnings.push_back(std::move(w));
            } catch (const JudgeParseError& e) {
                r.warnings.push_back(e.what());
                vlm_ok = false;
            }
        }
        pl_sum += m.pl;
        clip_sum += m.n_clip;
        if (m.vlm_score) vlm_sum += *m.vlm_score;
        r.per_image.push_back(m);
    }
    const double n = static_cast<double>(targets.size());
    if (which.pl) r.pl = pl_sum / n;
    if (which.n_clip) r.n_clip = clip_sum / n;
    if (vlm_ok) r.vlm_score = vlm_sum / n;
    return r;
}

ImprovementTable improvement_pct(const std::map<std::string, MetricReport>& baseline,
                                 const std::map<std::string, MetricReport>& ours) {
    for (const auto& [id, _] : baseline)
        if (!ours.count(id)) throw MismatchError("task '" + id + "' has no result in the compared run");
    for (const auto& [id, _] : ours)
        if (!baseline.count(id)) throw MismatchError("task '" + id + "' has no baseline result");

    ImprovementTable table;
    std::vector<double> task_means;
    for (const auto& [id, b] : baseline) {
        const MetricReport& o = ours.at(id);
        const struct {
            const char* name;
            std::optional<double> b, o;
            bool lower_better;
        } metrics[] = {{"pl", b.pl, o.pl, true}, {"n_clip", b.n_clip, o.n_clip, true},
                       {"vlm_score", b.vlm_score, o.vlm_score, false}};
        double sum = 0;
        int count = 0;
        for (const auto& m : metrics) {
            if (!m.b || !m.o) continue;
            ImprovementEntry e{id, m.name, *m.b, *m.o, std::nullopt};
            if (*m.b == 0) {
                table.excluded.push_back(id + "/" + m.name);
            } else {
                e.pct = m.lower_better ? 100.0 * (*m.b - *m.o) / *m.b : 100.0 * (*m.o - *m.b) / *m.b;
                sum += *e.pct;
                ++count;
            }
            table.entries.push_back(e);
        }
        if (count > 0) {
            table.task_mean[id] = sum / count;
            task_means.push_back(sum / count);
        }
    }
    if (!task_means.empty()) {
        double s = 0;
        for (double v : task_means) s += v;
        table.aggregate = s / static_cast<double>(task_means.size());
    }
    return table;
}

json ImprovementTable::to_json() const {
    json rows = json::array();
    for (const auto& e : entries)
        rows.push_back({{"task", e.task}, {"metric", e.metric}, {"baseline", e.baseline}, {"ours", e.ours},
                        {"pct", e.pct ? json(*e.pct) : json(nullptr)}, {"undefined", !e.pct.has_value()}});
    return {{"entries", std::move(rows)},
            {"task_mean", task_mean},
            {"aggregate", aggregate ? json(*aggregate) : json(nullptr)},
            {"excluded", excluded},
            {"definition", "per metric 100*(baseline-ours)/baseline for pl and n_clip, 100*(ours-baseline)/baseline "
                           "for vlm_score; mean over metrics, then over tasks; zero baselines excluded"}};
}

std::string ImprovementTable::to_text() const {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : entries)
        rows.push_back({e.task, e.metric, fmt::format("{:.4f}", e.baseline), fmt::format("{:.4f}", e.ours),
                        e.pct ? fmt::format("{:+.2f}", *e.pct) : "undefined"});
    std::string out = format_table({"task", "metric", "baseline", "ours", "Impr.(%)"}, rows);
    out += aggregate ? fmt::format("aggregate Impr.(%): {:+.2f}\n", *aggregate) : "aggregate Impr.(%): undefined\n";
    return out;
}

std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> width(header.size());
    for (size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows)
        for (size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (size_t c = 0; c < width.size(); ++c) {
            const std::string cell = c < cells.size() ? cells[c] : "";
            if (c > 0) s += "  ";
            const std::string pad(width[c] - cell.size(), ' ');
            s += c == 0 ? cell + pad : pad + cell;
        }
        while (!s.empty() && s.back() == ' ') s.pop_back();
        return s + "\n";
    };
    std::string out = line(header);
    size_t total = 0;
    for (size_t c = 0; c < width.size(); ++c) total += width[c] + (c > 0 ? 2 : 0);
    out += std::string(total, '-') + "\n";
    for (const auto& r : rows) out += line(r);
    return out;
}

} // namespace sceneloop::metrics
