#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace affmatch {

// One manually annotated affiliation with the registry ids it should
// resolve to. Absent keys mean an empty expectation.
struct GoldRecord {
    std::string affiliation;
    std::map<std::string, std::set<std::string>> expected; // keys: rnsr, siren, grid, country
};

// JSON array of {"affiliation": ..., "rnsr": [...], "siren": [...],
// "grid": [...], "country": [...]}. Malformed records name their index.
std::vector<GoldRecord> load_gold(const std::filesystem::path& path);

struct RecordDiff {
    std::size_t index = 0;
    std::string affiliation;
    std::set<std::string> expected;
    std::set<std::string> predicted;
};

struct MetricsReport {
    std::string registry;
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::vector<RecordDiff> errors; // records where expected != predicted

    // 0/0 counts as a perfect score; raw counts stay available either way.
    double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
    double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }

    nlohmann::json to_json() const;
};

using MatcherFn = std::function<std::set<std::string>(const std::string& affiliation)>;

// Micro-averaged set-difference counting: per record with expectation E and
// prediction P, tp += |E ∩ P|, fp += |P \ E|, fn += |E \ P|.
MetricsReport evaluate(const MatcherFn& matcher, const std::vector<GoldRecord>& gold,
                       const std::string& registry);

} // namespace affmatch
