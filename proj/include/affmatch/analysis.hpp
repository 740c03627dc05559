#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace affmatch {

enum class AnalyzerMode { Standard, Acronym };

struct AnalyzerSpec {
    std::string name;
    AnalyzerMode mode = AnalyzerMode::Standard;
};

// A folded token plus its location in the original (unfolded) input.
// Offsets are byte indices into the UTF-8 input; start is inclusive,
// end exclusive, and both always fall on code point boundaries.
struct Token {
    std::string text;
    std::size_t position = 0;
    std::size_t start_offset = 0;
    std::size_t end_offset = 0;

    bool operator==(const Token&) const = default;
};

const AnalyzerSpec& standard_analyzer();
const AnalyzerSpec& acronym_analyzer();
const AnalyzerSpec& analyzer_by_name(const std::string& name);

// Splits on any non-alphanumeric code point, lowercases, and folds Latin
// diacritics to their base letters (equivalent to NFD-decomposing and
// dropping combining marks for the Latin ranges). Combining marks in
// already-decomposed input are dropped without breaking the token.
// Empty tokens are dropped; single-character tokens are kept in both modes.
std::vector<Token> analyze(std::string_view text, const AnalyzerSpec& spec);

// Token texts joined by single spaces; the canonical folded form used for
// value comparisons (conditions, geo-mapping keys, sub-match containment).
std::string fold_join(std::string_view text);

} // namespace affmatch
