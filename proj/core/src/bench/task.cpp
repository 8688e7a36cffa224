#include "sceneloop/bench/task.hpp"

#include "sceneloop/agent/trajectory.hpp"
#include "sceneloop/scene/image.hpp"

#include <fmt/format.h>

#include <fstream>

namespace sceneloop::bench {

namespace {

const std::pair<TaskKind, std::string_view> kKinds[] = {{TaskKind::camera_adjust, "camera_adjust"},
                                                        {TaskKind::edit, "edit"},
                                                        {TaskKind::compositional, "compositional"},
                                                        {TaskKind::reconstruct, "reconstruct"},
                                                        {TaskKind::animate, "animate"}};

const std::pair<EngineRequirement, std::string_view> kEngines[] = {
    {EngineRequirement::embedded, "embedded"}, {EngineRequirement::external, "external"},
    {EngineRequirement::either, "either"}};

struct Reader {
    const json& root;
    fs::path base;
    fs::path file;

    [[noreturn]] void fail(const std::string& ptr, const std::string& problem) const { throw FormatError(ptr, problem, file); }

    std::string string(const char* key, bool required) const {
        const std::string ptr = std::string("/") + key;
        if (!root.contains(key)) {
            if (required) fail(ptr, "required field is missing");
            return {};
        }
        const json& v = root.at(key);
        if (!v.is_string()) fail(ptr, "expected a string");
        if (required && v.get<std::string>().empty()) fail(ptr, "must not be empty");
        return v.get<std::string>();
    }

    fs::path path(const std::string& s) const {
        fs::path p(s);
        return (p.is_absolute() ? p : base / p).lexically_normal();
    }

    std::optional<fs::path> optional_path(const char* key) const {
        if (!root.contains(key) || root.at(key).is_null()) return std::nullopt;
        const std::string s = string(key, true);
        return path(s);
    }
};

} // namespace

std::string_view to_string(TaskKind k) {
    for (const auto& [kind, name] : kKinds)
        if (kind == k) return name;
    return "reconstruct";
}

std::string_view to_string(EngineRequirement e) {
    for (const auto& [req, name] : kEngines)
        if (req == e) return name;
    return "either";
}

bool needs_initial_program(TaskKind k) {
    return k == TaskKind::camera_adjust || k == TaskKind::edit || k == TaskKind::compositional;
}

FormatError::FormatError(std::string pointer, std::string problem, const fs::path& file)
    : Error(fmt::format("{}{}: {}", file.empty() ? "" : file.string() + " at ", pointer.empty() ? "/" : pointer,
                        problem)),
      pointer_(std::move(pointer)) {}

TaskInstance parse_task(const json& j, const fs::path& base_dir, const fs::path& source) {
    if (!j.is_object()) throw FormatError("", "task file must hold a JSON object", source);
    Reader r{j, base_dir, source};
    if (!j.contains("schema_version")) r.fail("/schema_version", "required field is missing");
    if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kTaskSchemaVersion)
        r.fail("/schema_version", fmt::format("unsupported version (expected {})", kTaskSchemaVersion));

    static const std::vector<std::string> known = {"schema_version", "id", "kind", "instruction",
                                                   "target_images",  "initial_program", "assets_dir",
                                                   "engine",         "metrics", "replay", "description"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end()) r.fail("/" + key, "unknown field");

    TaskInstance t;
    t.source = source;
    t.id = r.string("id", true);
    const std::string kind = r.string("kind", true);
    bool found = false;
    for (const auto& [k, name] : kKinds)
        if (name == kind) t.kind = k, found = true;
    if (!found) r.fail("/kind", "expected one of camera_adjust, edit, compositional, reconstruct, animate");
    t.instruction = r.string("instruction", true);

    if (!j.contains("target_images")) r.fail("/target_images", "required field is missing");
    const json& targets = j.at("target_images");
    if (!targets.is_array()) r.fail("/target_images", "expected an array of paths");
    if (targets.empty()) r.fail("/target_images", "at least one target image is required");
    for (size_t i = 0; i < targets.size(); ++i) {
        if (!targets[i].is_string()) r.fail(fmt::format("/target_images/{}", i), "expected a string");
        t.target_images.push_back(r.path(targets[i].get<std::string>()));
    }

    t.initial_program = r.optional_path("initial_program");
    if (needs_initial_program(t.kind) && !t.initial_program)
        r.fail("/initial_program", fmt::format("required for {} tasks", kind));
    if (t.kind == TaskKind::reconstruct && t.initial_program)
        r.fail("/initial_program", "reconstruct tasks start from an empty scene");
    t.assets_dir = r.optional_path("assets_dir");
    t.replay = r.optional_path("replay");

    if (j.contains("engine")) {
        const std::string e = r.string("engine", true);
        found = false;
        for (const auto& [req, name] : kEngines)
            if (name == e) t.engine = req, found = true;
        if (!found) r.fail("/engine", "expected embedded, external or either");
    }
    if (j.contains("metrics")) {
        const json& m = j.at("metrics");
        if (!m.is_array()) r.fail("/metrics", "expected an array");
        t.metrics = {false, false, false};
        for (size_t i = 0; i < m.size(); ++i) {
            const std::string name = m[i].is_string() ? m[i].get<std::string>() : "";
            if (name == "pl") t.metrics.pl = true;
            else if (name == "n_clip") t.metrics.n_clip = true;
            else if (name == "vlm") t.metrics.vlm = true;
            else r.fail(fmt::format("/metrics/{}", i), "expected pl, n_clip or vlm");
        }
    }
    return t;
}

TaskInstance load_task(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("", "cannot open task file", path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw FormatError("", "not valid JSON", path);
    return parse_task(j, fs::absolute(path).parent_path(), path);
}

json task_to_json(const TaskInstance& t) {
    json targets = json::array();
    for (const auto& p : t.target_images) targets.push_back(p.string());
    json metrics = json::array();
    if (t.metrics.pl) metrics.push_back("pl");
    if (t.metrics.n_clip) metrics.push_back("n_clip");
    if (t.metrics.vlm) metrics.push_back("vlm");
    json j = {{"schema_version", kTaskSchemaVersion},
              {"id", t.id},
              {"kind", to_string(t.kind)},
              {"instruction", t.instruction},
              {"target_images", targets},
              {"engine", to_string(t.engine)},
              {"metrics", metrics}};
    if (t.initial_program) j["initial_program"] = t.initial_program->string();
    if (t.assets_dir) j["assets_dir"] = t.assets_dir->string();
    if (t.replay) j["replay"] = t.replay->string();
    return j;
}

agent::EpisodeTask make_episode_task(const TaskInstance& t) {
    agent::EpisodeTask e;
    e.id = t.id;
    e.kind = std::string(to_string(t.kind));
    e.instruction = t.instruction;
    for (const auto& p : t.target_images) e.targets.push_back(scene::read_png(p));
    if (t.initial_program) e.initial_program = agent::read_text_file(*t.initial_program);
    return e;
}

} // namespace sceneloop::bench
