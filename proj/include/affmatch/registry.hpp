#pragma once

#include "affmatch/percolator.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace affmatch {

enum class RegistryKind { Country, Grid, Rnsr };

std::string to_string(RegistryKind kind);
RegistryKind registry_kind_from_string(const std::string& s);

struct RegistryEntry {
    std::string id;
    RegistryKind registry = RegistryKind::Country;
    // criterion name -> values as they appear in the source registry
    std::map<std::string, std::vector<std::string>> fields;
};

// How an indirect criterion's id values are expanded into stored queries.
enum class Expansion { None, EmploymentZone, UrbanUnit };

struct CriterionSpec {
    std::string name;
    QueryKind kind = QueryKind::Phrase;
    int min_should_match = 0; // used when kind == Bag
    AnalyzerSpec analyzer = standard_analyzer();
    Expansion expansion = Expansion::None;
};

class CriterionCatalog {
public:
    static const CriterionCatalog& default_catalog();

    explicit CriterionCatalog(std::vector<CriterionSpec> specs);

    const CriterionSpec* find(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }
    const std::vector<CriterionSpec>& criteria() const { return specs_; }

private:
    std::vector<CriterionSpec> specs_;
};

// City -> employment zone / urban unit ids, with the reverse composition
// used to expand indirect criteria into per-city stored queries. City keys
// are compared after standard analysis.
struct GeoMapping {
    std::map<std::string, std::string> employment_zones; // folded city -> zone id
    std::map<std::string, std::string> urban_units;      // folded city -> unit id
    std::map<std::string, std::vector<std::string>> zone_cities; // zone id -> raw city names
    std::map<std::string, std::vector<std::string>> unit_cities; // unit id -> raw city names

    static GeoMapping load(const std::filesystem::path& path);
    bool empty() const { return employment_zones.empty() && urban_units.empty(); }
};

// JSON lines, one entry per line:
//   {"id": "...", "registry": "country"|"grid"|"rnsr", "fields": {criterion: [values]}}
// Values are trimmed and empties dropped. Parse failures name the line number.
std::vector<RegistryEntry> load_registry(const std::filesystem::path& path, RegistryKind kind);

struct DeriveStats {
    std::size_t zones_added = 0;
    std::size_t units_added = 0;
    std::size_t unmapped_cities = 0;
};

// Adds rnsr_zone_emploi / rnsr_urban_unit ids to entries whose city is
// covered by the mapping. Unmapped cities are skipped and counted.
DeriveStats derive_indirect(std::vector<RegistryEntry>& entries, const GeoMapping& mapping);

using IndexMap = std::map<std::string, CriterionIndex>;

// Turns every field value of every entry into stored queries, one frozen
// index per criterion. Indirect criteria are expanded through the mapping:
// the zone id value becomes one phrase query per member city, so a
// neighbouring city in the input percolates to every entry of the zone.
IndexMap build_indexes(const std::vector<RegistryEntry>& entries, const CriterionCatalog& catalog,
                       const GeoMapping& mapping = {});

} // namespace affmatch
