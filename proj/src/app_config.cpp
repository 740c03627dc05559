#include "affmatch/app_config.hpp"

#include "affmatch/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>

using nlohmann::json;

namespace affmatch {

AppConfig AppConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open app config: " + path.string());
    }
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ConfigError("app config " + path.string() + ": " + e.what());
    }

    AppConfig config;
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    const auto resolve = [&](const std::string& raw) {
        std::filesystem::path p(raw);
        if (p.is_relative()) {
            p = base / p;
        }
        if (!std::filesystem::exists(p)) {
            throw ConfigError("app config " + path.string() + ": path does not resolve: " + raw);
        }
        return p;
    };

    try {
        const auto read_path_map = [&](const char* key,
                                       std::map<RegistryKind, std::filesystem::path>& out) {
            if (!root.contains(key)) {
                return;
            }
            for (const auto& [registry, p] : root.at(key).items()) {
                out[registry_kind_from_string(registry)] = resolve(p.get<std::string>());
            }
        };
        read_path_map("fixtures", config.fixtures);
        read_path_map("match_configs", config.match_configs);
        if (root.contains("geo_mapping")) {
            config.geo_mapping = resolve(root.at("geo_mapping").get<std::string>());
        }
        if (root.contains("snapshot_dir")) {
            // May not exist yet; `index` creates it.
            std::filesystem::path p(root.at("snapshot_dir").get<std::string>());
            config.snapshot_dir = p.is_relative() ? base / p : p;
        }
        if (root.contains("host")) {
            config.host = root.at("host").get<std::string>();
        }
        if (root.contains("port")) {
            config.port = root.at("port").get<int>();
        }
        if (root.contains("verbosity")) {
            config.verbosity = root.at("verbosity").get<int>();
        }
    } catch (const json::exception& e) {
        throw ConfigError("app config " + path.string() + ": " + e.what());
    }
    return config;
}

std::optional<AppConfig> AppConfig::from_env() {
    const char* path = std::getenv("AFFMATCH_CONFIG");
    if (path == nullptr || *path == '\0') {
        return std::nullopt;
    }
    return load(path);
}

} // namespace affmatch
