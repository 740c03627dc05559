#include "affmatch/app_config.hpp"
#include "affmatch/errors.hpp"
#include "affmatch/evaluation.hpp"
#include "affmatch/json_io.hpp"
#include "affmatch/matcher.hpp"
#include "affmatch/service.hpp"
#include "affmatch/snapshot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace affmatch;

namespace {

constexpr std::array<RegistryKind, 3> kRegistries = {RegistryKind::Country, RegistryKind::Grid,
                                                     RegistryKind::Rnsr};

fs::path snapshot_path(const fs::path& dir, RegistryKind kind) {
    return dir / (to_string(kind) + ".json");
}

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

struct CommonOptions {
    std::string app_config_path;
    int verbosity = 0;

    std::optional<AppConfig> app_config() const {
        if (!app_config_path.empty()) {
            return AppConfig::load(app_config_path);
        }
        return AppConfig::from_env();
    }
};

MatchConfig match_config_for(RegistryKind kind, const std::string& explicit_path,
                             const std::optional<AppConfig>& app) {
    if (!explicit_path.empty()) {
        MatchConfig config = MatchConfig::load(explicit_path);
        if (config.registry != kind) {
            throw ConfigError("match config " + explicit_path + " targets registry '" +
                              to_string(config.registry) + "', expected '" + to_string(kind) +
                              "'");
        }
        return config;
    }
    if (app.has_value()) {
        if (const auto it = app->match_configs.find(kind); it != app->match_configs.end()) {
            return MatchConfig::load(it->second);
        }
    }
    return MatchConfig::defaults(kind);
}

int run_index(const CommonOptions& common, const std::string& registry, std::string input,
              std::string geo, std::string snapshot_dir) {
    const RegistryKind kind = registry_kind_from_string(registry);
    const auto app = common.app_config();
    if (input.empty() && app.has_value()) {
        if (const auto it = app->fixtures.find(kind); it != app->fixtures.end()) {
            input = it->second.string();
        }
    }
    if (input.empty()) {
        throw ConfigError("no input file for registry '" + registry +
                          "' (use --input or an app config)");
    }
    if (geo.empty() && app.has_value() && !app->geo_mapping.empty()) {
        geo = app->geo_mapping.string();
    }
    if (snapshot_dir.empty()) {
        snapshot_dir =
            app.has_value() && !app->snapshot_dir.empty() ? app->snapshot_dir.string() : "snapshots";
    }

    std::vector<RegistryEntry> entries = load_registry(input, kind);
    GeoMapping mapping;
    if (!geo.empty()) {
        mapping = GeoMapping::load(geo);
    }
    DeriveStats stats = derive_indirect(entries, mapping);
    if (common.verbosity > 0) {
        std::cerr << "loaded " << entries.size() << " entries; derived " << stats.zones_added
                  << " employment zones, " << stats.units_added << " urban units; "
                  << stats.unmapped_cities << " unmapped cities\n";
    }

    RegistrySnapshot snapshot =
        RegistrySnapshot::build(kind, std::move(entries), CriterionCatalog::default_catalog(),
                                mapping);

    // One line per criterion index, including zero counts for the
    // registry's own criteria.
    std::set<std::string> names;
    const std::string prefix = to_string(kind) + "_";
    for (const CriterionSpec& spec : CriterionCatalog::default_catalog().criteria()) {
        if (spec.name.rfind(prefix, 0) == 0) {
            names.insert(spec.name);
        }
    }
    for (const auto& [name, _] : snapshot.indexes) {
        names.insert(name);
    }
    for (const std::string& name : names) {
        const auto it = snapshot.indexes.find(name);
        std::cout << name << ": " << (it == snapshot.indexes.end() ? 0 : it->second.size())
                  << "\n";
    }

    const fs::path out = snapshot_path(snapshot_dir, kind);
    save_snapshot(snapshot, out);
    if (common.verbosity > 0) {
        std::cerr << "snapshot written to " << out.string() << "\n";
    }
    return 0;
}

int run_match(const CommonOptions& common, const std::string& registry, const std::string& query,
              const std::string& input, const std::string& config_path,
              const std::vector<std::string>& condition_flags, std::string snapshot_dir) {
    const RegistryKind kind = registry_kind_from_string(registry);
    const auto app = common.app_config();
    if (snapshot_dir.empty()) {
        snapshot_dir =
            app.has_value() && !app->snapshot_dir.empty() ? app->snapshot_dir.string() : "snapshots";
    }

    // Configuration problems must surface before any matching starts.
    const MatchConfig config = match_config_for(kind, config_path, app);
    config.validate(CriterionCatalog::default_catalog());
    std::vector<Condition> conditions;
    for (const std::string& flag : condition_flags) {
        conditions.push_back(condition_from_flag(flag));
    }

    const RegistrySnapshot snapshot = load_snapshot(snapshot_path(snapshot_dir, kind));

    const auto emit = [&](const std::string& affiliation) {
        const auto results = match_affiliation(affiliation, conditions, config, snapshot);
        std::cout << match_line_to_json(affiliation, kind, results).dump() << "\n";
    };

    if (!query.empty()) {
        emit(query);
        return 0;
    }

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!input.empty() && input != "-") {
        file.open(input);
        if (!file) {
            throw DataError("cannot open input file: " + input);
        }
        in = &file;
    }
    std::string line;
    while (std::getline(*in, line)) {
        if (!trimmed(line).empty()) {
            emit(line);
        }
    }
    return 0;
}

int run_evaluate(const CommonOptions& common, const std::string& gold_path,
                 std::vector<std::string> registries, const std::string& out_path,
                 const std::map<std::string, std::string>& config_paths,
                 std::string snapshot_dir) {
    const auto app = common.app_config();
    if (snapshot_dir.empty()) {
        snapshot_dir =
            app.has_value() && !app->snapshot_dir.empty() ? app->snapshot_dir.string() : "snapshots";
    }

    const std::vector<GoldRecord> gold = load_gold(gold_path);
    const bool has_siren = std::any_of(gold.begin(), gold.end(), [](const GoldRecord& r) {
        const auto it = r.expected.find("siren");
        return it != r.expected.end() && !it->second.empty();
    });
    if (has_siren) {
        std::cerr << "warning: gold set carries siren expectations but no siren matcher exists;"
                  << " they are ignored\n";
    }

    if (registries.empty()) {
        for (const RegistryKind kind : kRegistries) {
            if (fs::exists(snapshot_path(snapshot_dir, kind))) {
                registries.push_back(to_string(kind));
            }
        }
        if (registries.empty()) {
            throw ConfigError("no snapshots found under " + snapshot_dir +
                              "; run `affmatch index` first");
        }
    }

    nlohmann::json reports = nlohmann::json::array();
    std::printf("%-10s %-10s %-10s\n", "matcher", "precision", "recall");
    for (const std::string& registry : registries) {
        const RegistryKind kind = registry_kind_from_string(registry);
        const std::string explicit_config =
            config_paths.count(registry) > 0 ? config_paths.at(registry) : "";
        const MatchConfig config = match_config_for(kind, explicit_config, app);
        config.validate(CriterionCatalog::default_catalog());
        const RegistrySnapshot snapshot = load_snapshot(snapshot_path(snapshot_dir, kind));

        const MatcherFn matcher = [&](const std::string& affiliation) {
            std::set<std::string> ids;
            for (const MatchResult& r : match_affiliation(affiliation, {}, config, snapshot)) {
                ids.insert(r.registry_id);
            }
            return ids;
        };
        const MetricsReport report = evaluate(matcher, gold, registry);
        std::printf("%-10s %-10.3f %-10.3f\n", registry.c_str(), report.precision(),
                    report.recall());
        if (common.verbosity > 0) {
            for (const RecordDiff& diff : report.errors) {
                std::cerr << registry << " record " << diff.index << " '" << diff.affiliation
                          << "': expected " << nlohmann::json(diff.expected).dump()
                          << ", predicted " << nlohmann::json(diff.predicted).dump() << "\n";
            }
        }
        reports.push_back(report.to_json());
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            throw DataError("cannot write report: " + out_path);
        }
        out << nlohmann::json{{"reports", reports}}.dump(2) << "\n";
    }
    return 0;
}

int run_serve(const CommonOptions& common, std::string host, int port,
              const std::map<std::string, std::string>& config_paths, std::string snapshot_dir) {
    const auto app = common.app_config();
    if (snapshot_dir.empty()) {
        snapshot_dir =
            app.has_value() && !app->snapshot_dir.empty() ? app->snapshot_dir.string() : "snapshots";
    }
    if (host.empty()) {
        host = app.has_value() ? app->host : "127.0.0.1";
    }
    if (port == 0) {
        port = app.has_value() ? app->port : 8080;
    }

    MatchService service;
    std::thread loader([&] {
        try {
            for (const RegistryKind kind : kRegistries) {
                const fs::path path = snapshot_path(snapshot_dir, kind);
                if (!fs::exists(path)) {
                    continue;
                }
                const std::string registry = to_string(kind);
                const std::string explicit_config =
                    config_paths.count(registry) > 0 ? config_paths.at(registry) : "";
                service.add_registry(load_snapshot(path),
                                     match_config_for(kind, explicit_config, app));
                if (common.verbosity > 0) {
                    std::cerr << "loaded snapshot " << path.string() << "\n";
                }
            }
            service.set_ready();
            std::cerr << "serving on " << host << ":" << port << "\n";
        } catch (const std::exception& e) {
            std::cerr << "error while loading snapshots: " << e.what() << "\n";
            service.stop();
        }
    });

    const bool ok = service.listen(host, port);
    loader.join();
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"registry affiliation matcher"};
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--app-config", common.app_config_path,
                   "JSON file with default paths (env: AFFMATCH_CONFIG)");
    app.add_flag("-v,--verbose", common.verbosity, "more diagnostics on stderr");

    std::string registry, input, geo, snapshot_dir, query, config_path, gold_path, out_path, host;
    std::vector<std::string> condition_flags, eval_registries;
    std::map<std::string, std::string> config_paths;
    int port = 0;

    CLI::App* index = app.add_subcommand("index", "build criterion indexes from a registry file");
    index->add_option("--registry", registry, "country, grid or rnsr")->required();
    index->add_option("--input", input, "registry JSON-lines file");
    index->add_option("--geo", geo, "geo mapping JSON (employment zones, urban units)");
    index->add_option("--snapshot-dir", snapshot_dir, "where to persist the snapshot");

    CLI::App* match = app.add_subcommand("match", "match affiliation strings against a snapshot");
    match->add_option("--registry", registry, "country, grid or rnsr")->required();
    match->add_option("--query", query, "one affiliation string");
    match->add_option("--input", input, "file with one affiliation per line, or - for stdin");
    match->add_option("--config", config_path, "match config JSON (default: built-in strategies)");
    match->add_option("--condition", condition_flags,
                      "criterion=value filter, may be repeated");
    match->add_option("--snapshot-dir", snapshot_dir, "snapshot directory");

    CLI::App* evaluate = app.add_subcommand("evaluate", "precision/recall against a gold set");
    evaluate->add_option("--gold", gold_path, "gold standard JSON file")->required();
    evaluate->add_option("--registry", eval_registries,
                         "registries to evaluate (default: all with snapshots)");
    evaluate->add_option("--out", out_path, "write the full report JSON here");
    evaluate->add_option("--config-country", config_paths["country"], "country match config");
    evaluate->add_option("--config-grid", config_paths["grid"], "grid match config");
    evaluate->add_option("--config-rnsr", config_paths["rnsr"], "rnsr match config");
    evaluate->add_option("--snapshot-dir", snapshot_dir, "snapshot directory");

    CLI::App* serve = app.add_subcommand("serve", "HTTP service over the snapshots");
    serve->add_option("--host", host, "bind address (default 127.0.0.1)");
    serve->add_option("--port", port, "bind port (default 8080)");
    serve->add_option("--config-country", config_paths["country"], "country match config");
    serve->add_option("--config-grid", config_paths["grid"], "grid match config");
    serve->add_option("--config-rnsr", config_paths["rnsr"], "rnsr match config");
    serve->add_option("--snapshot-dir", snapshot_dir, "snapshot directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (index->parsed()) {
            return run_index(common, registry, input, geo, snapshot_dir);
        }
        if (match->parsed()) {
            if (query.empty() && input.empty()) {
                input = "-";
            }
            return run_match(common, registry, query, input, config_path, condition_flags,
                             snapshot_dir);
        }
        if (evaluate->parsed()) {
            return run_evaluate(common, gold_path, eval_registries, out_path, config_paths,
                                snapshot_dir);
        }
        if (serve->parsed()) {
            return run_serve(common, host, port, config_paths, snapshot_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
