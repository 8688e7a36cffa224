#include "support.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <algorithm>

#include <unistd.h>

namespace testing {

fs::path data_path(const std::string& rel) { return fs::path(SCENELOOP_TEST_DATA) / rel; }
fs::path fixture_path(const std::string& rel) { return fs::path(SCENELOOP_FIXTURES) / rel; }

TempDir::TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    for (;;) {
        path_ = fs::temp_directory_path() / ("sceneloop-" + tag + "-" + std::to_string(::getpid()) + "-" +
                                             std::to_string(rng() % 1000000007));
        if (fs::create_directories(path_)) break;
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

sceneloop::scene::Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return sceneloop::scene::Image(w, h, std::array<std::uint8_t, 3>{r, g, b});
}

const char* const kBasicScene = R"(set_background color=(0.1,0.1,0.12) ambient=0.3
add_primitive name="floor" shape="plane" location=(0,0,0) scale=(6,6,1) color=(0.6,0.6,0.6)
add_primitive name="box" shape="cube" location=(0,0,0.5) color=(0.8,0.2,0.2)
add_primitive name="ball" shape="sphere" location=(1.5,0.5,0.4) scale=(0.8,0.8,0.8) color=(0.2,0.3,0.9)
add_light name="sun" kind="sun" direction=(-0.4,-0.3,-1) energy=2.5
add_camera name="Camera" location=(5,-5,4) look_at=(0,0,0.4) fov_y=0.8
)";

std::string snapshot_tree(const fs::path& root, const std::vector<std::string>& skip) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), root));
    std::sort(files.begin(), files.end());
    std::ostringstream out;
    for (const auto& f : files) {
        out << f.generic_string() << "\n";
        if (std::find(skip.begin(), skip.end(), f.filename().string()) != skip.end()) continue;
        std::ifstream in(root / f, std::ios::binary);
        out << in.rdbuf() << "\n";
    }
    return out.str();
}

} // namespace testing
