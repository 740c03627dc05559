#pragma once

#include "affmatch/matcher.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace affmatch {

// The one serialization of match results, shared by the CLI and the HTTP
// service so both emit byte-identical JSON. Keys are emitted in sorted
// order; spans as [start, end) pairs.
nlohmann::json results_to_json(const std::vector<MatchResult>& results);

// One CLI output line: {"input": ..., "registry": ..., "results": [...]}
nlohmann::json match_line_to_json(const std::string& input, RegistryKind registry,
                                  const std::vector<MatchResult>& results);

// Parses [{"criterion": ..., "value": ...}, ...]. Throws ConfigError.
std::vector<Condition> conditions_from_json(const nlohmann::json& array);

// Parses a repeatable "criterion=value" CLI flag. Throws ConfigError.
Condition condition_from_flag(const std::string& flag);

} // namespace affmatch
