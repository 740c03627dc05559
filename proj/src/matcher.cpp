#include "affmatch/matcher.hpp"

#include "affmatch/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>

using nlohmann::json;

namespace affmatch {

MatchConfig MatchConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open match config: " + path.string());
    }
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ConfigError("match config " + path.string() + ": " + e.what());
    }
    MatchConfig config;
    try {
        config.registry = registry_kind_from_string(root.at("registry").get<std::string>());
        for (const auto& group : root.at("groups")) {
            StrategyGroup g;
            for (const auto& strategy : group) {
                Strategy s;
                for (const auto& criterion : strategy) {
                    s.criteria.push_back(criterion.get<std::string>());
                }
                g.strategies.push_back(std::move(s));
            }
            config.groups.push_back(std::move(g));
        }
    } catch (const json::exception& e) {
        throw ConfigError("match config " + path.string() + ": " + e.what());
    }
    return config;
}

MatchConfig MatchConfig::defaults(RegistryKind kind) {
    const auto groups = [](std::vector<std::vector<std::vector<std::string>>> raw) {
        std::vector<StrategyGroup> out;
        for (auto& g : raw) {
            StrategyGroup group;
            for (auto& s : g) {
                group.strategies.push_back(Strategy{std::move(s)});
            }
            out.push_back(std::move(group));
        }
        return out;
    };
    MatchConfig config;
    config.registry = kind;
    switch (kind) {
        case RegistryKind::Country:
            config.groups = groups({
                {{"country_name", "grid_city"},
                 {"country_name", "grid_name"},
                 {"country_name", "country_subdivision_name"}},
                {{"country_name"},
                 {"country_alpha3"},
                 {"country_subdivision_name"},
                 {"country_subdivision_code"}},
            });
            break;
        case RegistryKind::Grid:
            config.groups = groups({
                {{"grid_name", "grid_city", "grid_country"},
                 {"grid_name", "grid_city", "grid_country_code"},
                 {"grid_name", "grid_acronym", "grid_city"}},
                {{"grid_name", "grid_city"}, {"grid_acronym", "grid_city", "grid_country"}},
                {{"grid_name", "grid_country"}},
            });
            break;
        case RegistryKind::Rnsr:
            config.groups = groups({
                {{"rnsr_code_number"}},
                {{"rnsr_name", "rnsr_supervisor_acronym", "rnsr_city"},
                 {"rnsr_name", "rnsr_supervisor_name", "rnsr_city"},
                 {"rnsr_acronym", "rnsr_supervisor_acronym", "rnsr_city"}},
                {{"rnsr_name", "rnsr_supervisor_acronym", "rnsr_zone_emploi"},
                 {"rnsr_name", "rnsr_supervisor_name", "rnsr_zone_emploi"},
                 {"rnsr_acronym", "rnsr_supervisor_acronym", "rnsr_zone_emploi"}},
                {{"rnsr_name", "rnsr_city"}, {"rnsr_name", "rnsr_zone_emploi"}},
            });
            break;
    }
    return config;
}

void MatchConfig::validate(const CriterionCatalog& catalog) const {
    if (groups.empty()) {
        throw ConfigError("match config has no strategy groups");
    }
    for (const StrategyGroup& group : groups) {
        if (group.strategies.empty()) {
            throw ConfigError("strategy group is empty");
        }
        for (const Strategy& strategy : group.strategies) {
            if (strategy.criteria.empty()) {
                throw ConfigError("strategy has no criteria");
            }
            std::unordered_set<std::string> seen;
            for (const std::string& criterion : strategy.criteria) {
                if (!catalog.contains(criterion)) {
                    throw ConfigError("unknown criterion '" + criterion + "' in strategy");
                }
                if (!seen.insert(criterion).second) {
                    throw ConfigError("duplicate criterion '" + criterion + "' in strategy");
                }
            }
        }
    }
}

RegistrySnapshot RegistrySnapshot::build(RegistryKind kind, std::vector<RegistryEntry> loaded,
                                         const CriterionCatalog& catalog,
                                         const GeoMapping& mapping) {
    RegistrySnapshot snapshot;
    snapshot.registry = kind;
    derive_indirect(loaded, mapping);
    snapshot.indexes = build_indexes(loaded, catalog, mapping);
    for (RegistryEntry& entry : loaded) {
        std::string id = entry.id;
        snapshot.entries.emplace(std::move(id), std::move(entry));
    }
    return snapshot;
}

CriterionMatch match_criterion(const CriterionIndex& index, std::string_view input) {
    CriterionMatch match;
    match.criterion = index.name();
    for (const PercolationHit& hit : index.percolate(input)) {
        for (const std::string& id : hit.doc->ids) {
            auto& spans = match.id_spans[id];
            spans.insert(hit.spans.begin(), hit.spans.end());
        }
    }
    return match;
}

std::vector<MatchResult> run_strategy(const Strategy& strategy, std::string_view input,
                                      const RegistrySnapshot& snapshot,
                                      const std::vector<Condition>& conditions,
                                      const CriterionCatalog& catalog) {
    if (strategy.criteria.empty()) {
        throw ConfigError("strategy has no criteria");
    }
    for (const std::string& criterion : strategy.criteria) {
        if (!catalog.contains(criterion)) {
            throw ConfigError("unknown criterion '" + criterion + "' in strategy");
        }
    }

    std::vector<CriterionMatch> matches;
    for (const std::string& criterion : strategy.criteria) {
        const auto it = snapshot.indexes.find(criterion);
        if (it == snapshot.indexes.end()) {
            return {}; // criterion known but holds no queries for this registry
        }
        CriterionMatch match = match_criterion(it->second, input);
        if (match.id_spans.empty()) {
            return {}; // conjunction already failed
        }
        matches.push_back(std::move(match));
    }

    // Intersect entry ids over all criteria of the strategy.
    std::vector<MatchResult> results;
    for (const auto& [id, first_spans] : matches.front().id_spans) {
        MatchResult result;
        result.registry_id = id;
        result.evidence[matches.front().criterion] = first_spans;
        bool in_all = true;
        for (std::size_t c = 1; c < matches.size(); ++c) {
            const auto it = matches[c].id_spans.find(id);
            if (it == matches[c].id_spans.end()) {
                in_all = false;
                break;
            }
            result.evidence[matches[c].criterion] = it->second;
        }
        if (in_all) {
            result.matched_by.insert(strategy.criteria);
            results.push_back(std::move(result));
        }
    }

    results = apply_conditions(std::move(results), conditions, snapshot.entries, catalog);
    std::sort(results.begin(), results.end(),
              [](const MatchResult& a, const MatchResult& b) {
                  return a.registry_id < b.registry_id;
              });
    return results;
}

std::vector<MatchResult> apply_conditions(std::vector<MatchResult> results,
                                          const std::vector<Condition>& conditions,
                                          const std::map<std::string, RegistryEntry>& entries,
                                          const CriterionCatalog& catalog) {
    if (conditions.empty()) {
        return results;
    }
    for (const Condition& condition : conditions) {
        if (!catalog.contains(condition.criterion)) {
            throw ConfigError("unknown criterion '" + condition.criterion + "' in condition");
        }
    }

    std::vector<MatchResult> kept;
    for (MatchResult& result : results) {
        const auto entry_it = entries.find(result.registry_id);
        bool ok = entry_it != entries.end();
        for (const Condition& condition : conditions) {
            if (!ok) {
                break;
            }
            const auto field_it = entry_it->second.fields.find(condition.criterion);
            if (field_it == entry_it->second.fields.end()) {
                ok = false;
                break;
            }
            const std::string wanted = fold_join(condition.value);
            ok = std::any_of(field_it->second.begin(), field_it->second.end(),
                             [&](const std::string& v) { return fold_join(v) == wanted; });
        }
        if (ok) {
            kept.push_back(std::move(result));
        }
    }
    return kept;
}

namespace {

// Merges token-level spans into maximal runs of consecutive input tokens.
std::vector<Span> merge_spans(const std::set<Span>& spans, const std::vector<Token>& tokens) {
    std::map<std::size_t, std::size_t> start_to_position;
    for (const Token& t : tokens) {
        start_to_position[t.start_offset] = t.position;
    }
    std::vector<Span> merged;
    Span current{0, 0};
    std::size_t last_position = 0;
    bool open = false;
    for (const Span& span : spans) {
        const auto pos_it = start_to_position.find(span.start);
        const std::size_t position =
            pos_it != start_to_position.end() ? pos_it->second : static_cast<std::size_t>(-1);
        if (open && pos_it != start_to_position.end() && position == last_position + 1) {
            current.end = span.end;
        } else {
            if (open) {
                merged.push_back(current);
            }
            current = span;
            open = true;
        }
        last_position = position;
    }
    if (open) {
        merged.push_back(current);
    }
    return merged;
}

struct EvidenceView {
    // criterion -> folded text of each merged evidence span
    std::map<std::string, std::vector<std::string>> folded;
    std::size_t total_length = 0;

    EvidenceView(const MatchResult& result, std::string_view input,
                 const std::vector<Token>& tokens) {
        for (const auto& [criterion, spans] : result.evidence) {
            std::vector<std::string> texts;
            for (const Span& span : merge_spans(spans, tokens)) {
                texts.push_back(
                    fold_join(input.substr(span.start, span.end - span.start)));
                total_length += span.end - span.start;
            }
            std::sort(texts.begin(), texts.end());
            folded[criterion] = std::move(texts);
        }
    }
};

// B is dominated by A when all of B's merged evidence is contained in A's
// for the same criteria, strictly on at least one of them.
bool dominates(const EvidenceView& a, const EvidenceView& b) {
    bool strict = false;
    for (const auto& [criterion, b_texts] : b.folded) {
        const auto a_it = a.folded.find(criterion);
        if (a_it == a.folded.end()) {
            return false;
        }
        for (const std::string& b_text : b_texts) {
            const bool contained = std::any_of(
                a_it->second.begin(), a_it->second.end(), [&](const std::string& a_text) {
                    return a_text.find(b_text) != std::string::npos;
                });
            if (!contained) {
                return false;
            }
        }
        if (a_it->second != b_texts) {
            strict = true;
        }
    }
    return strict;
}

} // namespace

std::vector<MatchResult> filter_submatches(std::vector<MatchResult> results,
                                           std::string_view input) {
    if (results.size() < 2) {
        return results;
    }
    const std::vector<Token> tokens = analyze(input, standard_analyzer());

    std::vector<EvidenceView> views;
    views.reserve(results.size());
    for (const MatchResult& result : results) {
        views.emplace_back(result, input, tokens);
    }

    // Largest evidence first so dominators are kept before their sub-matches.
    std::vector<std::size_t> order(results.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (views[a].total_length != views[b].total_length) {
            return views[a].total_length > views[b].total_length;
        }
        return results[a].registry_id < results[b].registry_id;
    });

    std::vector<std::size_t> kept_idx;
    for (const std::size_t candidate : order) {
        const bool dominated =
            std::any_of(kept_idx.begin(), kept_idx.end(), [&](std::size_t kept) {
                return dominates(views[kept], views[candidate]);
            });
        if (!dominated) {
            kept_idx.push_back(candidate);
        }
    }
    std::sort(kept_idx.begin(), kept_idx.end());

    std::vector<MatchResult> kept;
    kept.reserve(kept_idx.size());
    for (const std::size_t i : kept_idx) {
        kept.push_back(std::move(results[i]));
    }
    return kept;
}

std::vector<MatchResult> match_affiliation(std::string_view input,
                                           const std::vector<Condition>& conditions,
                                           const MatchConfig& config,
                                           const RegistrySnapshot& snapshot) {
    config.validate(CriterionCatalog::default_catalog());

    for (const StrategyGroup& group : config.groups) {
        std::map<std::string, MatchResult> merged;
        for (const Strategy& strategy : group.strategies) {
            for (MatchResult& result : run_strategy(strategy, input, snapshot, conditions,
                                                    CriterionCatalog::default_catalog())) {
                const auto it = merged.find(result.registry_id);
                if (it == merged.end()) {
                    merged.emplace(result.registry_id, std::move(result));
                    continue;
                }
                MatchResult& existing = it->second;
                for (const auto& [criterion, spans] : result.evidence) {
                    existing.evidence[criterion].insert(spans.begin(), spans.end());
                }
                existing.matched_by.insert(result.matched_by.begin(), result.matched_by.end());
            }
        }

        std::vector<MatchResult> results;
        results.reserve(merged.size());
        for (auto& [_, result] : merged) {
            results.push_back(std::move(result));
        }
        results = filter_submatches(std::move(results), input);
        if (!results.empty()) {
            return results; // later groups are never percolated
        }
    }
    return {};
}

} // namespace affmatch
