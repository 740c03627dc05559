#pragma once

#include "affmatch/registry.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace affmatch {

// A conjunction of criteria: an entry matches iff every criterion matched.
struct Strategy {
    std::vector<std::string> criteria;

    bool operator==(const Strategy&) const = default;
};

// Strategies evaluated together; the first group with surviving results wins.
struct StrategyGroup {
    std::vector<Strategy> strategies;
};

struct MatchConfig {
    RegistryKind registry = RegistryKind::Country;
    std::vector<StrategyGroup> groups;

    // {"registry": "...", "groups": [[["criterion", ...], ...], ...]}
    static MatchConfig load(const std::filesystem::path& path);
    static MatchConfig defaults(RegistryKind kind);

    // Non-empty groups/strategies, known criteria, no duplicates within a
    // strategy. Throws ConfigError.
    void validate(const CriterionCatalog& catalog) const;
};

// A known structured fact about the affiliation, e.g. (grid_country, France).
struct Condition {
    std::string criterion;
    std::string value;
};

// Percolation of one input through one criterion index, grouped by entry.
struct CriterionMatch {
    std::string criterion;
    std::map<std::string, std::set<Span>> id_spans;
};

struct MatchResult {
    std::string registry_id;
    std::map<std::string, std::set<Span>> evidence; // criterion -> input spans
    std::set<std::vector<std::string>> matched_by;  // strategies, as criteria lists
};

// Everything the matcher reads: one registry's entries and frozen indexes.
struct RegistrySnapshot {
    RegistryKind registry = RegistryKind::Country;
    std::map<std::string, RegistryEntry> entries;
    IndexMap indexes;

    static RegistrySnapshot build(RegistryKind kind, std::vector<RegistryEntry> loaded,
                                  const CriterionCatalog& catalog, const GeoMapping& mapping = {});
};

CriterionMatch match_criterion(const CriterionIndex& index, std::string_view input);

std::vector<MatchResult> run_strategy(const Strategy& strategy, std::string_view input,
                                      const RegistrySnapshot& snapshot,
                                      const std::vector<Condition>& conditions,
                                      const CriterionCatalog& catalog);

// Removes results whose per-criterion evidence is contained, as folded
// substrings of the input, in a surviving result's evidence, with strict
// containment on at least one criterion. Equal-evidence results all survive.
std::vector<MatchResult> filter_submatches(std::vector<MatchResult> results,
                                           std::string_view input);

std::vector<MatchResult> apply_conditions(std::vector<MatchResult> results,
                                          const std::vector<Condition>& conditions,
                                          const std::map<std::string, RegistryEntry>& entries,
                                          const CriterionCatalog& catalog);

// Runs the group loop: all strategies of a group, union of their results,
// sub-match filtering, stop at the first group with survivors.
std::vector<MatchResult> match_affiliation(std::string_view input,
                                           const std::vector<Condition>& conditions,
                                           const MatchConfig& config,
                                           const RegistrySnapshot& snapshot);

} // namespace affmatch
