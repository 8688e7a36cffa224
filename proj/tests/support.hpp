#pragma once

#include "sceneloop/scene/image.hpp"

#include <filesystem>
#include <string>

namespace testing {

namespace fs = std::filesystem;

fs::path data_path(const std::string& rel = {});
fs::path fixture_path(const std::string& rel = {});

// Fresh empty directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

sceneloop::scene::Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

// Two-object scene with a light and a camera; every test that needs "some
// scene" uses this one.
extern const char* const kBasicScene;

// Byte-level listing of a directory tree: "relative/path\n<content>\n" per
// file, sorted by path. `skip` names files whose content is left out.
std::string snapshot_tree(const fs::path& root, const std::vector<std::string>& skip = {});

} // namespace testing
