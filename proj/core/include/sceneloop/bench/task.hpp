#pragma once

#include "sceneloop/agent/episode.hpp"
#include "sceneloop/metrics/report.hpp"
#include "sceneloop/util/error.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sceneloop::bench {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kTaskSchemaVersion = 1;

enum class TaskKind { camera_adjust, edit, compositional, reconstruct, animate };
enum class EngineRequirement { embedded, external, either };

std::string_view to_string(TaskKind k);
std::string_view to_string(EngineRequirement e);
// Kinds that start from an existing program.
bool needs_initial_program(TaskKind k);

// Task file problem; `pointer` is the JSON pointer of the offending field.
class FormatError : public Error {
public:
    FormatError(std::string pointer, std::string problem, const fs::path& file = {});
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

struct TaskInstance {
    std::string id;
    TaskKind kind = TaskKind::reconstruct;
    std::string instruction;
    std::vector<fs::path> target_images;  // absolute
    std::optional<fs::path> initial_program;
    std::optional<fs::path> assets_dir;
    EngineRequirement engine = EngineRequirement::either;
    metrics::MetricSelection metrics;
    // Scripted model turns for the replay backend.
    std::optional<fs::path> replay;
    fs::path source;  // the task file itself
};

// Relative paths resolve against the task file's directory.
TaskInstance parse_task(const json& j, const fs::path& base_dir, const fs::path& source = {});
TaskInstance load_task(const fs::path& path);
json task_to_json(const TaskInstance& t);

// Reads targets and the initial program.
agent::EpisodeTask make_episode_task(const TaskInstance& t);

} // namespace sceneloop::bench
