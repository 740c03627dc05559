#include "affmatch/evaluation.hpp"

#include "affmatch/errors.hpp"

#include <algorithm>
#include <fstream>

using nlohmann::json;

namespace affmatch {

std::vector<GoldRecord> load_gold(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open gold file: " + path.string());
    }
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw DataError("gold file " + path.string() + ": " + e.what());
    }
    if (!root.is_array()) {
        throw DataError("gold file " + path.string() + ": expected a JSON array");
    }

    static const std::vector<std::string> kRegistryKeys = {"rnsr", "siren", "grid", "country"};

    std::vector<GoldRecord> records;
    for (std::size_t i = 0; i < root.size(); ++i) {
        const json& obj = root[i];
        const auto fail = [&](const std::string& msg) {
            throw DataError("gold file " + path.string() + ", record " + std::to_string(i) +
                            ": " + msg);
        };
        if (!obj.is_object() || !obj.contains("affiliation") ||
            !obj.at("affiliation").is_string()) {
            fail("missing affiliation string");
        }
        GoldRecord record;
        record.affiliation = obj.at("affiliation").get<std::string>();
        if (record.affiliation.empty()) {
            fail("empty affiliation");
        }
        for (const std::string& key : kRegistryKeys) {
            auto& ids = record.expected[key];
            if (!obj.contains(key)) {
                continue;
            }
            if (!obj.at(key).is_array()) {
                fail("'" + key + "' must be an array of id strings");
            }
            for (const auto& id : obj.at(key)) {
                if (!id.is_string()) {
                    fail("'" + key + "' must be an array of id strings");
                }
                ids.insert(id.get<std::string>());
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

MetricsReport evaluate(const MatcherFn& matcher, const std::vector<GoldRecord>& gold,
                       const std::string& registry) {
    MetricsReport report;
    report.registry = registry;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const GoldRecord& record = gold[i];
        std::set<std::string> expected;
        if (const auto it = record.expected.find(registry); it != record.expected.end()) {
            expected = it->second;
        }
        const std::set<std::string> predicted = matcher(record.affiliation);

        std::vector<std::string> inter;
        std::set_intersection(expected.begin(), expected.end(), predicted.begin(),
                              predicted.end(), std::back_inserter(inter));
        report.tp += inter.size();
        report.fp += predicted.size() - inter.size();
        report.fn += expected.size() - inter.size();
        if (expected != predicted) {
            report.errors.push_back(RecordDiff{i, record.affiliation, expected, predicted});
        }
    }
    return report;
}

json MetricsReport::to_json() const {
    json diffs = json::array();
    for (const RecordDiff& diff : errors) {
        diffs.push_back(json{
            {"record", diff.index},
            {"affiliation", diff.affiliation},
            {"expected", diff.expected},
            {"predicted", diff.predicted},
        });
    }
    return json{
        {"registry", registry},
        {"tp", tp},
        {"fp", fp},
        {"fn", fn},
        {"precision", precision()},
        {"recall", recall()},
        {"errors", diffs},
    };
}

} // namespace affmatch
