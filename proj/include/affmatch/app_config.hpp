#pragma once

#include "affmatch/registry.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace affmatch {

// Optional defaults for the CLI, loaded from a JSON file. Explicit flags
// always win. The AFFMATCH_CONFIG environment variable overrides the path.
struct AppConfig {
    std::map<RegistryKind, std::filesystem::path> fixtures;
    std::map<RegistryKind, std::filesystem::path> match_configs;
    std::filesystem::path geo_mapping;
    std::filesystem::path snapshot_dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    int verbosity = 0;

    // Throws ConfigError when the file is unreadable or any referenced path
    // does not resolve.
    static AppConfig load(const std::filesystem::path& path);

    // Loads the file named by AFFMATCH_CONFIG, if set.
    static std::optional<AppConfig> from_env();
};

} // namespace affmatch
