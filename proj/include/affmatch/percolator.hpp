#pragma once

#include "affmatch/analysis.hpp"

#include <atomic>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace affmatch {

enum class QueryKind { Phrase, Bag };

std::string to_string(QueryKind kind);
QueryKind query_kind_from_string(const std::string& s);

// A stored percolation query over analyzed terms. Phrase requires all terms
// at consecutive positions in order; Bag requires a minimum share of the
// unique terms anywhere in the input. min_should_match is a signed
// percentage in [-100, 0] and is ignored for Phrase queries.
struct StoredQuery {
    QueryKind kind = QueryKind::Phrase;
    std::vector<std::string> terms;
    int min_should_match = -20;
};

// Number of unique terms the input must contain for the query to match.
// For -p%, floor(p% of the unique terms) may be missing; never below 1.
std::size_t required_term_count(const StoredQuery& query);
std::size_t unique_term_count(const StoredQuery& query);

struct QueryDoc {
    StoredQuery query;
    std::vector<std::string> ids; // sorted, unique, non-empty
    std::string criterion;
};

struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    auto operator<=>(const Span&) const = default;
};

struct PercolationHit {
    const QueryDoc* doc = nullptr;
    std::vector<Span> spans; // sorted, unique, within input bounds
};

// Transparent hashing so string keys can be probed with string_views.
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};

// One criterion's stored queries. Build single-writer, freeze, then
// percolate from any number of threads.
class CriterionIndex {
public:
    CriterionIndex() = default;
    CriterionIndex(std::string name, AnalyzerSpec analyzer);

    CriterionIndex(CriterionIndex&& other) noexcept;
    CriterionIndex& operator=(CriterionIndex&& other) noexcept;
    CriterionIndex(const CriterionIndex&) = delete;
    CriterionIndex& operator=(const CriterionIndex&) = delete;

    // Analyzes `raw` with the index analyzer and stores the query. Docs with
    // equal (kind, terms, msm) are merged by unioning ids. Throws DataError
    // when analysis yields no terms, naming the criterion and source value.
    void store_text(QueryKind kind, std::string_view raw,
                    const std::vector<std::string>& ids, int min_should_match = -20);

    // Stores a pre-analyzed doc (snapshot reload path). Same merge rule.
    void store(QueryDoc doc);

    void freeze();
    bool frozen() const { return frozen_; }

    std::vector<PercolationHit> percolate(std::string_view text) const;

    // Oracle twin of percolate: evaluates every stored query independently
    // against the token stream. Kept free of the inverted-map acceleration.
    std::vector<PercolationHit> brute_force_percolate(std::string_view text) const;

    const std::string& name() const { return name_; }
    const AnalyzerSpec& analyzer() const { return analyzer_; }
    std::size_t size() const { return docs_.size(); }
    const std::vector<QueryDoc>& docs() const { return docs_; }

    // Instrumentation: total percolate() calls answered by this index.
    std::uint64_t percolation_count() const { return percolations_.load(); }

private:
    std::string dedup_key(const StoredQuery& query) const;

    std::string name_;
    AnalyzerSpec analyzer_ = standard_analyzer();
    std::vector<QueryDoc> docs_;
    std::unordered_map<std::string, std::size_t> dedup_;
    // term -> indices of docs containing it (unique per doc)
    std::unordered_map<std::string, std::vector<std::uint32_t>, StringHash, std::equal_to<>>
        term_to_docs_;
    bool frozen_ = false;
    mutable std::atomic<std::uint64_t> percolations_{0};
};

} // namespace affmatch
