#include "sceneloop/bench/report.hpp"

#include "sceneloop/agent/trajectory.hpp"
#include "sceneloop/util/base64.hpp"

#include <fmt/format.h>

#include <regex>

namespace sceneloop::bench {

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{:.2f}", *v) : "-"; }

std::string html_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string img_tag(const scene::Image& img, const std::string& alt) {
    if (img.empty()) return "<span class=\"missing\">no image</span>";
    return fmt::format("<img alt=\"{}\" src=\"data:image/png;base64,{}\">", html_escape(alt),
                       base64::encode(scene::encode_png(img)));
}

} // namespace

json suite_to_json(const SuiteResult& result) {
    json rows = json::array();
    for (const auto& r : result.rows) {
        json row = {{"id", r.id},
                    {"kind", r.kind ? json(to_string(*r.kind)) : json(nullptr)},
                    {"completed", r.completed}};
        if (r.completed) {
            row["metrics"] = r.report.to_json();
            row["selected"] = {{"episode", r.episode}, {"round", r.round}, {"score", r.score}};
            row["episodes_failed"] = r.episodes_failed;
        } else {
            row["failure"] = r.failure;
        }
        rows.push_back(std::move(row));
    }
    json aggs = json::array();
    for (const auto& a : result.aggregates)
        aggs.push_back({{"kind", to_string(a.kind)},
                        {"completed", a.completed},
                        {"failed", a.failed},
                        {"mean_pl", opt(a.mean_pl)},
                        {"mean_n_clip", opt(a.mean_n_clip)},
                        {"mean_vlm_score", opt(a.mean_vlm)}});
    return {{"schema_version", 1},
            {"suite", result.name},
            {"config", result.config},
            {"rows", std::move(rows)},
            {"aggregates", std::move(aggs)}};
}

std::string suite_to_text(const SuiteResult& result) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : result.rows) {
        const std::string kind = r.kind ? std::string(to_string(*r.kind)) : "?";
        if (r.completed)
            rows.push_back({r.id, kind, cell(r.report.pl), cell(r.report.n_clip), cell(r.report.vlm_score),
                            fmt::format("ok (episode {}, round {})", r.episode, r.round)});
        else
            rows.push_back({r.id, kind, "-", "-", "-", "FAILED"});
    }
    std::string out = fmt::format("suite: {}\n\n", result.name);
    out += metrics::format_table({"task", "kind", "PL", "N-CLIP", "VLM", "status"}, rows);
    std::vector<std::vector<std::string>> agg;
    for (const auto& a : result.aggregates)
        agg.push_back({std::string(to_string(a.kind)), std::to_string(a.completed), std::to_string(a.failed),
                       cell(a.mean_pl), cell(a.mean_n_clip), cell(a.mean_vlm)});
    out += "\n" + metrics::format_table({"kind", "completed", "failed", "mean PL", "mean N-CLIP", "mean VLM"}, agg);
    bool any_failure = false;
    for (const auto& r : result.rows) {
        if (r.completed) continue;
        if (!any_failure) out += "\nfailures:\n";
        any_failure = true;
        out += fmt::format("  {}: {}\n", r.id, r.failure);
    }
    return out;
}

std::string suite_to_html(const SuiteResult& result) {
    std::string out = fmt::format(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{0}</title>\n"
        "<style>body{{font-family:sans-serif}}td,th{{padding:4px 10px;vertical-align:top}}"
        "img{{width:192px;image-rendering:pixelated}}.failed{{color:#a00}}</style>\n"
        "</head><body>\n<h1>{0}</h1>\n<table>\n"
        "<tr><th>task</th><th>kind</th><th>target</th><th>final</th><th>PL</th><th>N-CLIP</th><th>VLM</th></tr>\n",
        html_escape(result.name));
    for (const auto& r : result.rows) {
        const std::string kind = r.kind ? std::string(to_string(*r.kind)) : "?";
        if (r.completed)
            out += fmt::format("<tr class=\"task-row\"><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td>"
                               "<td>{}</td></tr>\n",
                               html_escape(r.id), kind, img_tag(r.target, "target"), img_tag(r.final_render, "final"),
                               cell(r.report.pl), cell(r.report.n_clip), cell(r.report.vlm_score));
        else
            out += fmt::format("<tr class=\"task-row failed\"><td>{}</td><td>{}</td><td>{}</td>"
                               "<td colspan=\"4\">{}</td></tr>\n",
                               html_escape(r.id), kind, img_tag(r.target, "target"), html_escape(r.failure));
    }
    out += "</table>\n<h2>Per kind</h2>\n<table>\n<tr><th>kind</th><th>completed</th><th>failed</th><th>mean "
           "PL</th><th>mean N-CLIP</th><th>mean VLM</th></tr>\n";
    for (const auto& a : result.aggregates)
        out += fmt::format("<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
                           to_string(a.kind), a.completed, a.failed, cell(a.mean_pl), cell(a.mean_n_clip),
                           cell(a.mean_vlm));
    out += "</table>\n</body></html>\n";
    return out;
}

void write_report(const SuiteResult& result, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));
    agent::write_text_file(out_dir / "results.json", agent::dump_json(suite_to_json(result)));
    agent::write_text_file(out_dir / "results.txt", suite_to_text(result));
    agent::write_text_file(out_dir / "report.html", suite_to_html(result));
}

json TrajectoryScore::to_json() const {
    json arr = json::array();
    for (const auto& r : rounds)
        arr.push_back({{"episode", r.episode},
                       {"round", r.round},
                       {"metrics", r.recomputed.to_json()},
                       {"matches_summary", r.matches}});
    return {{"rounds", std::move(arr)}, {"all_match", all_match}};
}

TrajectoryScore rescore_trajectory(const fs::path& root, const std::vector<scene::Image>& targets,
                                   metrics::Embedder& embedder) {
    if (!fs::is_directory(root)) throw Error("not a trajectory directory: " + root.string());
    std::vector<std::pair<int, fs::path>> episodes;
    static const std::regex episode_dir(R"(episode-(\d+))");
    for (const auto& e : fs::directory_iterator(root)) {
        std::smatch m;
        const std::string name = e.path().filename().string();
        if (e.is_directory() && std::regex_match(name, m, episode_dir)) episodes.emplace_back(std::stoi(m[1]), e.path());
    }
    std::sort(episodes.begin(), episodes.end());
    if (episodes.empty()) throw Error("no episode-<k> directories under " + root.string());

    TrajectoryScore out;
    for (const auto& [k, dir] : episodes) {
        const json summary = json::parse(agent::read_text_file(dir / "summary.json"));
        for (const auto& r : summary.at("rounds")) {
            if (!r.at("success").get<bool>()) continue;
            RoundScore s;
            s.episode = k;
            s.round = r.at("round").get<int>();
            const auto png = dir / fmt::format("round-{}", s.round) / "render-0.png";
            s.recomputed = metrics::evaluate(scene::read_png(png), targets, embedder, nullptr, {},
                                             metrics::MetricSelection{true, true, false});
            if (!r.at("metrics").is_null()) s.stored = metrics::MetricReport::from_json(r.at("metrics"));
            s.matches = s.stored && s.stored->to_json() == s.recomputed.to_json();
            out.all_match = out.all_match && s.matches;
            out.rounds.push_back(std::move(s));
        }
    }
    return out;
}

} // namespace sceneloop::bench
