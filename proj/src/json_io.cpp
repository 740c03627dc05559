#include "affmatch/json_io.hpp"

#include "affmatch/errors.hpp"

using nlohmann::json;

namespace affmatch {

json results_to_json(const std::vector<MatchResult>& results) {
    json out = json::array();
    for (const MatchResult& result : results) {
        json evidence = json::object();
        for (const auto& [criterion, spans] : result.evidence) {
            json span_list = json::array();
            for (const Span& span : spans) {
                span_list.push_back(json::array({span.start, span.end}));
            }
            evidence[criterion] = std::move(span_list);
        }
        json strategies = json::array();
        for (const auto& criteria : result.matched_by) {
            strategies.push_back(criteria);
        }
        out.push_back(json{{"id", result.registry_id},
                           {"evidence", std::move(evidence)},
                           {"strategies", std::move(strategies)}});
    }
    return out;
}

json match_line_to_json(const std::string& input, RegistryKind registry,
                        const std::vector<MatchResult>& results) {
    return json{{"input", input},
                {"registry", to_string(registry)},
                {"results", results_to_json(results)}};
}

std::vector<Condition> conditions_from_json(const json& array) {
    if (!array.is_array()) {
        throw ConfigError("conditions must be an array");
    }
    std::vector<Condition> conditions;
    for (const auto& item : array) {
        if (!item.is_object() || !item.contains("criterion") || !item.contains("value")) {
            throw ConfigError("each condition needs a criterion and a value");
        }
        conditions.push_back(Condition{item.at("criterion").get<std::string>(),
                                       item.at("value").get<std::string>()});
    }
    return conditions;
}

Condition condition_from_flag(const std::string& flag) {
    const auto eq = flag.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= flag.size()) {
        throw ConfigError("condition must look like criterion=value: " + flag);
    }
    return Condition{flag.substr(0, eq), flag.substr(eq + 1)};
}

} // namespace affmatch
