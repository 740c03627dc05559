#include "affmatch/analysis.hpp"

#include <array>
#include <stdexcept>

namespace affmatch {

namespace {

// Decodes one UTF-8 sequence starting at byte i. On malformed input the
// byte is consumed as U+FFFD so offsets stay consistent.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// ASCII folding for the Latin-1 Supplement letters (U+00C0..U+00FF).
// Empty string means the code point is not a letter there.
const char* latin1_fold(char32_t cp) {
    static constexpr std::array<const char*, 64> upper = {
        "a", "a", "a", "a", "a", "a", "ae", "c",  // C0-C7
        "e", "e", "e", "e", "i", "i", "i", "i",   // C8-CF
        "d", "n", "o", "o", "o", "o", "o", "",    // D0-D7 (D7 = multiply sign)
        "o", "u", "u", "u", "u", "y", "th", "ss", // D8-DF
        "a", "a", "a", "a", "a", "a", "ae", "c",  // E0-E7
        "e", "e", "e", "e", "i", "i", "i", "i",   // E8-EF
        "d", "n", "o", "o", "o", "o", "o", "",    // F0-F7 (F7 = divide sign)
        "o", "u", "u", "u", "u", "y", "th", "y",  // F8-FF
    };
    return upper[cp - 0xC0];
}

// ASCII folding for Latin Extended-A (U+0100..U+017F).
const char* latin_ext_a_fold(char32_t cp) {
    static constexpr std::array<const char*, 128> table = {
        // 0100-010F: A a A a A a C c C c C c C c D d
        "a", "a", "a", "a", "a", "a", "c", "c", "c", "c", "c", "c", "c", "c", "d", "d",
        // 0110-011F: D d E e E e E e E e E e G g G g
        "d", "d", "e", "e", "e", "e", "e", "e", "e", "e", "e", "e", "g", "g", "g", "g",
        // 0120-012F: G g G g H h H h I i I i I i I i
        "g", "g", "g", "g", "h", "h", "h", "h", "i", "i", "i", "i", "i", "i", "i", "i",
        // 0130-013F: I i IJ ij J j K k k L l L l L l L
        "i", "i", "ij", "ij", "j", "j", "k", "k", "k", "l", "l", "l", "l", "l", "l", "l",
        // 0140-014F: l L l N n N n N n n NG ng O o O o
        "l", "l", "l", "n", "n", "n", "n", "n", "n", "n", "ng", "ng", "o", "o", "o", "o",
        // 0150-015F: O o OE oe R r R r R r S s S s S s
        "o", "o", "oe", "oe", "r", "r", "r", "r", "r", "r", "s", "s", "s", "s", "s", "s",
        // 0160-016F: S s T t T t T t U u U u U u U u
        "s", "s", "t", "t", "t", "t", "t", "t", "u", "u", "u", "u", "u", "u", "u", "u",
        // 0170-017F: U u U u W w Y y Y Z z Z z Z z s
        "u", "u", "u", "u", "w", "w", "y", "y", "y", "z", "z", "z", "z", "z", "z", "s",
    };
    return table[cp - 0x100];
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF)   // CJK unified ideographs
        || (cp >= 0x3040 && cp <= 0x30FF)   // hiragana + katakana
        || (cp >= 0xAC00 && cp <= 0xD7AF);  // hangul syllables
}

enum class CharClass { Separator, Letter, CombiningMark, Ideograph };

// Classifies one code point and appends its folded form to `out` when it
// carries token content.
CharClass fold_codepoint(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        if (cp >= 'a' && cp <= 'z') {
            out.push_back(static_cast<char>(cp));
            return CharClass::Letter;
        }
        if (cp >= 'A' && cp <= 'Z') {
            out.push_back(static_cast<char>(cp - 'A' + 'a'));
            return CharClass::Letter;
        }
        if (cp >= '0' && cp <= '9') {
            out.push_back(static_cast<char>(cp));
            return CharClass::Letter;
        }
        return CharClass::Separator;
    }
    if (cp >= 0x300 && cp <= 0x36F) {
        return CharClass::CombiningMark;
    }
    if (cp >= 0xC0 && cp <= 0xFF) {
        const char* folded = latin1_fold(cp);
        if (*folded == '\0') {
            return CharClass::Separator;
        }
        out += folded;
        return CharClass::Letter;
    }
    if (cp >= 0x100 && cp <= 0x17F) {
        out += latin_ext_a_fold(cp);
        return CharClass::Letter;
    }
    if (cp >= 0x180 && cp <= 0x24F) {
        // Latin Extended-B: a curated subset, the rest is kept verbatim.
        switch (cp) {
            case 0x218: case 0x219: out.push_back('s'); return CharClass::Letter;
            case 0x21A: case 0x21B: out.push_back('t'); return CharClass::Letter;
            default: append_utf8(out, cp); return CharClass::Letter;
        }
    }
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) { // Greek uppercase
        append_utf8(out, cp + 0x20);
        return CharClass::Letter;
    }
    if (cp >= 0x3B1 && cp <= 0x3C9) { // Greek lowercase
        append_utf8(out, cp);
        return CharClass::Letter;
    }
    if (cp >= 0x400 && cp <= 0x40F) { // Cyrillic with diacritics, uppercase
        append_utf8(out, cp + 0x50);
        return CharClass::Letter;
    }
    if (cp >= 0x410 && cp <= 0x42F) { // Cyrillic uppercase
        append_utf8(out, cp + 0x20);
        return CharClass::Letter;
    }
    if (cp >= 0x430 && cp <= 0x45F) { // Cyrillic lowercase
        append_utf8(out, cp);
        return CharClass::Letter;
    }
    if (is_cjk(cp)) {
        append_utf8(out, cp);
        return CharClass::Ideograph;
    }
    return CharClass::Separator;
}

} // namespace

const AnalyzerSpec& standard_analyzer() {
    static const AnalyzerSpec spec{"standard", AnalyzerMode::Standard};
    return spec;
}

const AnalyzerSpec& acronym_analyzer() {
    static const AnalyzerSpec spec{"acronym", AnalyzerMode::Acronym};
    return spec;
}

const AnalyzerSpec& analyzer_by_name(const std::string& name) {
    if (name == "standard") {
        return standard_analyzer();
    }
    if (name == "acronym") {
        return acronym_analyzer();
    }
    throw std::invalid_argument("unknown analyzer: " + name);
}

std::vector<Token> analyze(std::string_view text, const AnalyzerSpec& spec) {
    (void)spec; // both modes share the folding pipeline; see analyzer docs
    std::vector<Token> tokens;
    std::string current;
    std::size_t token_start = 0;
    std::size_t token_end = 0;
    bool in_token = false;

    auto flush = [&] {
        if (in_token && !current.empty()) {
            tokens.push_back(Token{current, tokens.size(), token_start, token_end});
        }
        current.clear();
        in_token = false;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t cp_start = i;
        const char32_t cp = decode_utf8(text, i);
        std::string folded;
        const CharClass cls = fold_codepoint(cp, folded);
        switch (cls) {
            case CharClass::Separator:
                flush();
                break;
            case CharClass::CombiningMark:
                // Extends the current token's source range without content.
                if (in_token) {
                    token_end = i;
                }
                break;
            case CharClass::Letter:
                if (!in_token) {
                    in_token = true;
                    token_start = cp_start;
                }
                current += folded;
                token_end = i;
                break;
            case CharClass::Ideograph:
                // One token per ideograph.
                flush();
                tokens.push_back(Token{folded, tokens.size(), cp_start, i});
                break;
        }
    }
    flush();
    return tokens;
}

std::string fold_join(std::string_view text) {
    std::string out;
    for (const Token& t : analyze(text, standard_analyzer())) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t.text;
    }
    return out;
}

} // namespace affmatch
