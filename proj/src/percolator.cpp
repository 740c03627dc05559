#include "affmatch/percolator.hpp"

#include "affmatch/errors.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace affmatch {

std::string to_string(QueryKind kind) {
    return kind == QueryKind::Phrase ? "phrase" : "bag";
}

QueryKind query_kind_from_string(const std::string& s) {
    if (s == "phrase") {
        return QueryKind::Phrase;
    }
    if (s == "bag") {
        return QueryKind::Bag;
    }
    throw ConfigError("unknown query kind: " + s);
}

std::size_t unique_term_count(const StoredQuery& query) {
    std::unordered_set<std::string_view> uniq(query.terms.begin(), query.terms.end());
    return uniq.size();
}

std::size_t required_term_count(const StoredQuery& query) {
    const std::size_t n = unique_term_count(query);
    if (query.kind == QueryKind::Phrase) {
        return n;
    }
    const auto p = static_cast<std::size_t>(-query.min_should_match);
    const std::size_t missing_allowed = p * n / 100;
    const std::size_t required = n - missing_allowed;
    return required > 0 ? required : 1;
}

CriterionIndex::CriterionIndex(std::string name, AnalyzerSpec analyzer)
    : name_(std::move(name)), analyzer_(std::move(analyzer)) {}

CriterionIndex::CriterionIndex(CriterionIndex&& other) noexcept
    : name_(std::move(other.name_)),
      analyzer_(std::move(other.analyzer_)),
      docs_(std::move(other.docs_)),
      dedup_(std::move(other.dedup_)),
      term_to_docs_(std::move(other.term_to_docs_)),
      frozen_(other.frozen_),
      percolations_(other.percolations_.load()) {}

CriterionIndex& CriterionIndex::operator=(CriterionIndex&& other) noexcept {
    if (this != &other) {
        name_ = std::move(other.name_);
        analyzer_ = std::move(other.analyzer_);
        docs_ = std::move(other.docs_);
        dedup_ = std::move(other.dedup_);
        term_to_docs_ = std::move(other.term_to_docs_);
        frozen_ = other.frozen_;
        percolations_.store(other.percolations_.load());
    }
    return *this;
}

std::string CriterionIndex::dedup_key(const StoredQuery& query) const {
    std::string key = to_string(query.kind);
    if (query.kind == QueryKind::Bag) {
        key += std::to_string(query.min_should_match);
    }
    for (const auto& t : query.terms) {
        key.push_back('\x1f');
        key += t;
    }
    return key;
}

void CriterionIndex::store_text(QueryKind kind, std::string_view raw,
                                const std::vector<std::string>& ids, int min_should_match) {
    StoredQuery query;
    query.kind = kind;
    query.min_should_match = min_should_match;
    for (const Token& t : analyze(raw, analyzer_)) {
        query.terms.push_back(t.text);
    }
    if (query.terms.empty()) {
        throw DataError("criterion '" + name_ + "': value '" + std::string(raw) +
                        "' produced no tokens");
    }
    store(QueryDoc{std::move(query), ids, name_});
}

void CriterionIndex::store(QueryDoc doc) {
    if (frozen_) {
        throw std::logic_error("index '" + name_ + "' is frozen");
    }
    if (doc.query.terms.empty()) {
        throw DataError("criterion '" + name_ + "': empty term sequence");
    }
    if (doc.ids.empty()) {
        throw DataError("criterion '" + name_ + "': query doc without registry ids");
    }
    if (doc.query.min_should_match < -100 || doc.query.min_should_match > 0) {
        throw ConfigError("criterion '" + name_ + "': minimum_should_match " +
                          std::to_string(doc.query.min_should_match) +
                          " outside [-100, 0]");
    }
    std::sort(doc.ids.begin(), doc.ids.end());
    doc.ids.erase(std::unique(doc.ids.begin(), doc.ids.end()), doc.ids.end());
    doc.criterion = name_;

    const std::string key = dedup_key(doc.query);
    auto [it, inserted] = dedup_.emplace(key, docs_.size());
    if (inserted) {
        docs_.push_back(std::move(doc));
        return;
    }
    auto& ids = docs_[it->second].ids;
    ids.insert(ids.end(), doc.ids.begin(), doc.ids.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

void CriterionIndex::freeze() {
    if (frozen_) {
        return;
    }
    term_to_docs_.clear();
    for (std::size_t d = 0; d < docs_.size(); ++d) {
        std::unordered_set<std::string_view> seen;
        for (const auto& term : docs_[d].query.terms) {
            if (seen.insert(term).second) {
                term_to_docs_[term].push_back(static_cast<std::uint32_t>(d));
            }
        }
    }
    frozen_ = true;
}

namespace {

// Token occurrences of the input, grouped by folded text.
struct InputView {
    std::vector<Token> tokens;
    std::unordered_map<std::string_view, std::vector<std::size_t>> positions;

    explicit InputView(std::string_view text, const AnalyzerSpec& analyzer)
        : tokens(analyze(text, analyzer)) {
        for (const Token& t : tokens) {
            positions[t.text].push_back(t.position);
        }
    }
};

void collect_bag_spans(const QueryDoc& doc, const InputView& input, std::vector<Span>& spans) {
    std::unordered_set<std::string_view> terms(doc.query.terms.begin(), doc.query.terms.end());
    for (const Token& t : input.tokens) {
        if (terms.count(t.text) > 0) {
            spans.push_back(Span{t.start_offset, t.end_offset});
        }
    }
}

// Appends spans for every phrase occurrence; returns whether any was found.
bool collect_phrase_spans(const QueryDoc& doc, const InputView& input, std::vector<Span>& spans) {
    const auto& terms = doc.query.terms;
    const auto it = input.positions.find(terms.front());
    if (it == input.positions.end()) {
        return false;
    }
    bool found = false;
    for (const std::size_t start : it->second) {
        if (start + terms.size() > input.tokens.size()) {
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < terms.size(); ++k) {
            if (input.tokens[start + k].text != terms[k]) {
                ok = false;
                break;
            }
        }
        if (ok) {
            found = true;
            for (std::size_t k = 0; k < terms.size(); ++k) {
                const Token& t = input.tokens[start + k];
                spans.push_back(Span{t.start_offset, t.end_offset});
            }
        }
    }
    return found;
}

void normalize_spans(std::vector<Span>& spans) {
    std::sort(spans.begin(), spans.end());
    spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
}

} // namespace

std::vector<PercolationHit> CriterionIndex::percolate(std::string_view text) const {
    if (!frozen_) {
        throw std::logic_error("index '" + name_ + "' must be frozen before percolation");
    }
    percolations_.fetch_add(1, std::memory_order_relaxed);

    const InputView input(text, analyzer_);
    if (input.tokens.empty()) {
        return {};
    }

    // Count, per candidate doc, how many of its unique terms occur in the input.
    std::unordered_map<std::uint32_t, std::size_t> present_terms;
    for (const auto& [term, _] : input.positions) {
        const auto it = term_to_docs_.find(term);
        if (it == term_to_docs_.end()) {
            continue;
        }
        for (const std::uint32_t d : it->second) {
            ++present_terms[d];
        }
    }

    std::vector<std::uint32_t> candidates;
    candidates.reserve(present_terms.size());
    for (const auto& [d, _] : present_terms) {
        candidates.push_back(d);
    }
    std::sort(candidates.begin(), candidates.end());

    std::vector<PercolationHit> hits;
    for (const std::uint32_t d : candidates) {
        const QueryDoc& doc = docs_[d];
        const std::size_t present = present_terms[d];
        PercolationHit hit{&doc, {}};
        if (doc.query.kind == QueryKind::Phrase) {
            if (present < unique_term_count(doc.query)) {
                continue;
            }
            if (!collect_phrase_spans(doc, input, hit.spans)) {
                continue;
            }
        } else {
            if (present < required_term_count(doc.query)) {
                continue;
            }
            collect_bag_spans(doc, input, hit.spans);
        }
        normalize_spans(hit.spans);
        hits.push_back(std::move(hit));
    }
    return hits;
}

// Definitional evaluation of every stored query, one by one, with none of
// the machinery percolate() relies on. Slow on purpose.
std::vector<PercolationHit> CriterionIndex::brute_force_percolate(std::string_view text) const {
    const std::vector<Token> tokens = analyze(text, analyzer_);
    std::vector<PercolationHit> hits;
    if (tokens.empty()) {
        return hits;
    }
    for (const QueryDoc& doc : docs_) {
        const auto& terms = doc.query.terms;
        PercolationHit hit{&doc, {}};
        if (doc.query.kind == QueryKind::Phrase) {
            bool any = false;
            for (std::size_t start = 0; start + terms.size() <= tokens.size(); ++start) {
                bool all = true;
                for (std::size_t k = 0; k < terms.size(); ++k) {
                    if (tokens[start + k].text != terms[k]) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    any = true;
                    for (std::size_t k = 0; k < terms.size(); ++k) {
                        hit.spans.push_back(
                            Span{tokens[start + k].start_offset, tokens[start + k].end_offset});
                    }
                }
            }
            if (!any) {
                continue;
            }
        } else {
            std::set<std::string> uniq(terms.begin(), terms.end());
            std::size_t present = 0;
            for (const auto& term : uniq) {
                for (const Token& t : tokens) {
                    if (t.text == term) {
                        ++present;
                        break;
                    }
                }
            }
            if (present < required_term_count(doc.query)) {
                continue;
            }
            for (const Token& t : tokens) {
                if (uniq.count(t.text) > 0) {
                    hit.spans.push_back(Span{t.start_offset, t.end_offset});
                }
            }
        }
        normalize_spans(hit.spans);
        hits.push_back(std::move(hit));
    }
    return hits;
}

} // namespace affmatch
