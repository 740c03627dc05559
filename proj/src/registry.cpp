#include "affmatch/registry.hpp"

#include "affmatch/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

using nlohmann::json;

namespace affmatch {

std::string to_string(RegistryKind kind) {
    switch (kind) {
        case RegistryKind::Country: return "country";
        case RegistryKind::Grid: return "grid";
        case RegistryKind::Rnsr: return "rnsr";
    }
    return "?";
}

RegistryKind registry_kind_from_string(const std::string& s) {
    if (s == "country") {
        return RegistryKind::Country;
    }
    if (s == "grid") {
        return RegistryKind::Grid;
    }
    if (s == "rnsr") {
        return RegistryKind::Rnsr;
    }
    throw ConfigError("unknown registry kind: " + s);
}

CriterionCatalog::CriterionCatalog(std::vector<CriterionSpec> specs) : specs_(std::move(specs)) {}

const CriterionSpec* CriterionCatalog::find(const std::string& name) const {
    for (const auto& spec : specs_) {
        if (spec.name == name) {
            return &spec;
        }
    }
    return nullptr;
}

const CriterionCatalog& CriterionCatalog::default_catalog() {
    static const CriterionCatalog catalog = [] {
        const auto phrase = [](std::string name, const AnalyzerSpec& an = standard_analyzer(),
                               Expansion exp = Expansion::None) {
            return CriterionSpec{std::move(name), QueryKind::Phrase, 0, an, exp};
        };
        const auto bag = [](std::string name) {
            return CriterionSpec{std::move(name), QueryKind::Bag, -20, standard_analyzer(),
                                 Expansion::None};
        };
        // Phrase for short identity-like criteria, bag at -20% for the long
        // free-text ones (institution, laboratory and supervisor names).
        std::vector<CriterionSpec> specs = {
            phrase("country_alpha3"),
            phrase("country_name"),
            phrase("country_subdivision_code"),
            phrase("country_subdivision_name"),
            phrase("grid_acronym", acronym_analyzer()),
            phrase("grid_city"),
            phrase("grid_country"),
            phrase("grid_country_code"),
            bag("grid_name"),
            phrase("rnsr_acronym", acronym_analyzer()),
            phrase("rnsr_city"),
            phrase("rnsr_code_number"),
            phrase("rnsr_country_code"),
            bag("rnsr_name"),
            phrase("rnsr_supervisor_acronym", acronym_analyzer()),
            bag("rnsr_supervisor_name"),
            phrase("rnsr_urban_unit", standard_analyzer(), Expansion::UrbanUnit),
            phrase("rnsr_year"),
            phrase("rnsr_zone_emploi", standard_analyzer(), Expansion::EmploymentZone),
        };
        return CriterionCatalog(std::move(specs));
    }();
    return catalog;
}

GeoMapping GeoMapping::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open geo mapping file: " + path.string());
    }
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw DataError("geo mapping " + path.string() + ": " + e.what());
    }

    GeoMapping mapping;
    const auto read_section = [&](const char* key, std::map<std::string, std::string>& forward,
                                  std::map<std::string, std::vector<std::string>>& reverse) {
        if (!root.contains(key)) {
            return;
        }
        for (const auto& [city, id] : root.at(key).items()) {
            const std::string folded = fold_join(city);
            if (folded.empty()) {
                continue;
            }
            forward[folded] = id.get<std::string>();
            reverse[id.get<std::string>()].push_back(city);
        }
    };
    read_section("employment_zones", mapping.employment_zones, mapping.zone_cities);
    read_section("urban_units", mapping.urban_units, mapping.unit_cities);
    return mapping;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

std::vector<RegistryEntry> load_registry(const std::filesystem::path& path, RegistryKind kind) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open registry file: " + path.string());
    }

    const CriterionCatalog& catalog = CriterionCatalog::default_catalog();
    std::vector<RegistryEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }

        const auto fail = [&](const std::string& msg) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
        };

        if (!obj.is_object() || !obj.contains("id") || !obj.contains("registry") ||
            !obj.contains("fields")) {
            fail("entry must have id, registry and fields");
        }

        RegistryEntry entry;
        entry.id = obj.at("id").get<std::string>();
        try {
            entry.registry = registry_kind_from_string(obj.at("registry").get<std::string>());
        } catch (const ConfigError& e) {
            fail(e.what());
        }
        if (entry.registry != kind) {
            fail("entry registry '" + to_string(entry.registry) + "' does not match requested '" +
                 to_string(kind) + "'");
        }
        if (entry.id.empty()) {
            fail("empty entry id");
        }

        for (const auto& [criterion, values] : obj.at("fields").items()) {
            if (!catalog.contains(criterion)) {
                fail("unknown criterion '" + criterion + "'");
            }
            if (!values.is_array()) {
                fail("criterion '" + criterion + "' values must be an array");
            }
            std::vector<std::string> cleaned;
            for (const auto& v : values) {
                std::string s = trim(v.get<std::string>());
                if (!s.empty()) {
                    cleaned.push_back(std::move(s));
                }
            }
            if (!cleaned.empty()) {
                entry.fields[criterion] = std::move(cleaned);
            }
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

DeriveStats derive_indirect(std::vector<RegistryEntry>& entries, const GeoMapping& mapping) {
    DeriveStats stats;
    if (mapping.empty()) {
        return stats;
    }
    for (RegistryEntry& entry : entries) {
        const auto city_it = entry.fields.find("rnsr_city");
        if (city_it == entry.fields.end()) {
            continue;
        }
        const auto add_unique = [&](const char* criterion, const std::string& id) {
            auto& values = entry.fields[criterion];
            if (std::find(values.begin(), values.end(), id) == values.end()) {
                values.push_back(id);
            }
        };
        for (const std::string& city : city_it->second) {
            const std::string key = fold_join(city);
            bool mapped = false;
            if (const auto it = mapping.employment_zones.find(key);
                it != mapping.employment_zones.end()) {
                add_unique("rnsr_zone_emploi", it->second);
                ++stats.zones_added;
                mapped = true;
            }
            if (const auto it = mapping.urban_units.find(key); it != mapping.urban_units.end()) {
                add_unique("rnsr_urban_unit", it->second);
                ++stats.units_added;
                mapped = true;
            }
            if (!mapped) {
                ++stats.unmapped_cities;
            }
        }
    }
    return stats;
}

IndexMap build_indexes(const std::vector<RegistryEntry>& entries, const CriterionCatalog& catalog,
                       const GeoMapping& mapping) {
    IndexMap indexes;
    const auto index_for = [&](const CriterionSpec& spec) -> CriterionIndex& {
        auto it = indexes.find(spec.name);
        if (it == indexes.end()) {
            it = indexes.emplace(spec.name, CriterionIndex(spec.name, spec.analyzer)).first;
        }
        return it->second;
    };

    for (const RegistryEntry& entry : entries) {
        for (const auto& [criterion, values] : entry.fields) {
            const CriterionSpec* spec = catalog.find(criterion);
            if (spec == nullptr) {
                throw ConfigError("entry '" + entry.id + "': unknown criterion '" + criterion +
                                  "'");
            }
            CriterionIndex& index = index_for(*spec);
            const std::vector<std::string> ids{entry.id};
            for (const std::string& value : values) {
                try {
                    if (spec->expansion != Expansion::None) {
                        const auto& reverse = spec->expansion == Expansion::EmploymentZone
                                                  ? mapping.zone_cities
                                                  : mapping.unit_cities;
                        const auto it = reverse.find(value);
                        if (it != reverse.end()) {
                            for (const std::string& city : it->second) {
                                index.store_text(spec->kind, city, ids, spec->min_should_match);
                            }
                            continue;
                        }
                        // No composition known for this id: fall through and
                        // index the raw id itself.
                    }
                    index.store_text(spec->kind, value, ids, spec->min_should_match);
                } catch (const DataError& e) {
                    throw DataError("entry '" + entry.id + "': " + e.what());
                }
            }
        }
    }

    for (auto& [_, index] : indexes) {
        index.freeze();
    }
    return indexes;
}

} // namespace affmatch
