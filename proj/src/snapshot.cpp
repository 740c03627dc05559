#include "affmatch/snapshot.hpp"

#include "affmatch/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

using nlohmann::json;

namespace affmatch {

namespace {

constexpr int kSnapshotVersion = 1;

json analyzer_to_json(const AnalyzerSpec& spec) {
    return json{{"name", spec.name},
                {"mode", spec.mode == AnalyzerMode::Acronym ? "acronym" : "standard"}};
}

} // namespace

void save_snapshot(const RegistrySnapshot& snapshot, const std::filesystem::path& path) {
    json indexes = json::object();
    for (const auto& [criterion, index] : snapshot.indexes) {
        json docs = json::array();
        for (const QueryDoc& doc : index.docs()) {
            json d{{"kind", to_string(doc.query.kind)},
                   {"terms", doc.query.terms},
                   {"ids", doc.ids}};
            if (doc.query.kind == QueryKind::Bag) {
                d["msm"] = doc.query.min_should_match;
            }
            docs.push_back(std::move(d));
        }
        indexes[criterion] = json{{"analyzer", analyzer_to_json(index.analyzer())},
                                  {"docs", std::move(docs)}};
    }

    json entries = json::array();
    for (const auto& [_, entry] : snapshot.entries) {
        entries.push_back(json{{"id", entry.id},
                               {"registry", to_string(entry.registry)},
                               {"fields", entry.fields}});
    }

    const json root{{"version", kSnapshotVersion},
                    {"registry", to_string(snapshot.registry)},
                    {"entries", std::move(entries)},
                    {"indexes", std::move(indexes)}};

    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write snapshot: " + path.string());
    }
    out << root.dump(2) << "\n";
}

RegistrySnapshot load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open snapshot: " + path.string());
    }
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw DataError("snapshot " + path.string() + ": " + e.what());
    }

    try {
        if (root.at("version").get<int>() != kSnapshotVersion) {
            throw DataError("snapshot " + path.string() + ": unsupported version " +
                            root.at("version").dump());
        }
        RegistrySnapshot snapshot;
        snapshot.registry = registry_kind_from_string(root.at("registry").get<std::string>());

        for (const auto& entry_json : root.at("entries")) {
            RegistryEntry entry;
            entry.id = entry_json.at("id").get<std::string>();
            entry.registry = registry_kind_from_string(entry_json.at("registry").get<std::string>());
            entry.fields = entry_json.at("fields")
                               .get<std::map<std::string, std::vector<std::string>>>();
            snapshot.entries.emplace(entry.id, std::move(entry));
        }

        for (const auto& [criterion, index_json] : root.at("indexes").items()) {
            const auto& analyzer_json = index_json.at("analyzer");
            const AnalyzerSpec& analyzer =
                analyzer_by_name(analyzer_json.at("name").get<std::string>());
            CriterionIndex index(criterion, analyzer);
            for (const auto& doc_json : index_json.at("docs")) {
                QueryDoc doc;
                doc.criterion = criterion;
                doc.query.kind = query_kind_from_string(doc_json.at("kind").get<std::string>());
                doc.query.terms = doc_json.at("terms").get<std::vector<std::string>>();
                doc.query.min_should_match =
                    doc.query.kind == QueryKind::Bag ? doc_json.at("msm").get<int>() : 0;
                doc.ids = doc_json.at("ids").get<std::vector<std::string>>();
                index.store(std::move(doc));
            }
            index.freeze();
            snapshot.indexes.emplace(criterion, std::move(index));
        }
        return snapshot;
    } catch (const json::exception& e) {
        throw DataError("snapshot " + path.string() + ": " + e.what());
    }
}

} // namespace affmatch
