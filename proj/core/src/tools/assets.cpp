#include "sceneloop/tools/assets.hpp"

#include "sceneloop/util/text.hpp"

#include <algorithm>

namespace sceneloop::tools {

StubAssetProvider::StubAssetProvider(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(root_, ec)) {
        if (entry.is_regular_file() && text::to_lower(entry.path().extension().string()) == ".obj") {
            names_.push_back(entry.path().stem().string());
            files_[names_.back()] = entry.path().filename().string();
        }
    }
    std::sort(names_.begin(), names_.end());
}

Asset StubAssetProvider::resolve(const AssetRequest& request) {
    if (request.rig_and_animate)
        throw UnsupportedRequest("rig_and_animate is unsupported by the embedded engine; request a static asset and "
                                 "animate it with set_keyframe statements instead");
    const std::string& want = request.object_name;
    if (names_.empty()) throw ProviderError("the asset library at " + root_.string() + " is empty");

    const std::string* hit = nullptr;
    for (const auto& n : names_)
        if (n == want) hit = &n;
    const std::string lowered = text::to_lower(want);
    if (!hit) {
        for (const auto& n : names_)
            if (text::to_lower(n) == lowered) {
                hit = &n;
                break;
            }
    }
    if (!hit) {
        size_t best = 0;
        for (const auto& n : names_) {
            const std::string ln = text::to_lower(n);
            const auto mm = std::mismatch(ln.begin(), ln.end(), lowered.begin(), lowered.end());
            const auto len = static_cast<size_t>(mm.first - ln.begin());
            if (len > best) {
                best = len;
                hit = &n;
            }
        }
    }
    if (!hit) throw ProviderError("no asset in the library resembles '" + want + "'");

    Asset a;
    a.name = *hit;
    a.path = files_.at(*hit);
    a.full_path = root_ / a.path;
    return a;
}

} // namespace sceneloop::tools
