#pragma once

#include "sceneloop/util/error.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace sceneloop::tools {

struct AssetRequest {
    std::string object_name;
    std::string reference_type;  // "text" | "image" | ""
    std::string object_description;
    bool rig_and_animate = false;
    std::string action_description;
};

struct Asset {
    std::string name;                 // library entry that matched
    std::string path;                 // as it should appear in add_mesh path=...
    std::filesystem::path full_path;  // on disk
};

class ProviderError : public Error {
public:
    using Error::Error;
};

class UnsupportedRequest : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class AssetProvider {
public:
    virtual ~AssetProvider() = default;
    virtual Asset resolve(const AssetRequest& request) = 0;
};

// Serves *.obj files from one directory. Lookup is by exact stem, then
// case-insensitive stem, then the longest case-insensitive common prefix
// (ties go to the lexicographically smaller stem). Paths are reported
// relative to the directory, which is expected to be the engine's asset root.
class StubAssetProvider final : public AssetProvider {
public:
    explicit StubAssetProvider(std::filesystem::path root);

    Asset resolve(const AssetRequest& request) override;
    const std::vector<std::string>& names() const { return names_; }

private:
    std::filesystem::path root_;
    std::vector<std::string> names_;  // sorted stems
    std::map<std::string, std::string> files_;
};

} // namespace sceneloop::tools
