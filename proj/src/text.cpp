#include "tlr/text.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tlr/common.hpp"
#include "tlr/stemmer.hpp"

namespace tlr {

namespace {

// Checksums of the shipped stoplists (FNV-1a of the file bytes). The lists are
// fixed artifacts: results are only comparable across runs if they never drift.
constexpr std::uint64_t kChecksumStopEn = 0x1104e357c5c0e844ULL;
constexpr std::uint64_t kChecksumStopIt = 0x2957b2a76d3b26c9ULL;
constexpr std::uint64_t kChecksumJavaKw = 0x1809598b17bb9e8eULL;

bool is_ascii_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower_or_multibyte(unsigned char c) { return (c >= 'a' && c <= 'z') || c >= 0x80; }

// Lowercases ASCII and the Latin-1 supplement (covers Italian accents).
void utf8_lowercase(std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        unsigned char c = s[i];
        if (c >= 'A' && c <= 'Z') {
            s[i] = static_cast<char>(c - 'A' + 'a');
        } else if (c == 0xC3 && i + 1 < s.size()) {
            unsigned char d = s[i + 1];
            if (d >= 0x80 && d <= 0x9E && d != 0x97) s[i + 1] = static_cast<char>(d + 0x20);
            ++i;
        }
    }
}

}  // namespace

Language parse_language(const std::string& name) {
    if (name == "english" || name == "en") return Language::english;
    if (name == "italian" || name == "it") return Language::italian;
    throw ConfigError("unknown language: '" + name + "' (expected english or italian)");
}

std::string language_name(Language lang) {
    return lang == Language::english ? "english" : "italian";
}

std::vector<std::string> tokenize(const std::string& raw_text) {
    std::vector<std::string> tokens;
    std::string current;

    auto flush = [&] {
        if (!current.empty()) {
            utf8_lowercase(current);
            tokens.push_back(std::move(current));
            current.clear();
        }
    };

    const std::size_t n = raw_text.size();
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char c = raw_text[i];
        // digits, punctuation and whitespace all separate; '_' falls in here too
        if (!is_ascii_letter(c) && c < 0x80) {
            flush();
            continue;
        }
        if (!current.empty() && is_ascii_letter(c)) {
            const unsigned char prev = current.back();
            // camelCase boundary: lower→Upper, plus acronym end: "XMLFile" → XML | File
            if (is_upper(c) && is_lower_or_multibyte(prev)) {
                flush();
            } else if (is_upper(prev) && !is_upper(c) && current.size() > 1) {
                const char last = current.back();
                current.pop_back();
                flush();
                current.push_back(last);
            }
        }
        current.push_back(static_cast<char>(c));
    }
    flush();
    return tokens;
}

Preprocessor::Preprocessor(Language lang, const std::filesystem::path& data_dir)
    : lang_(lang) {
    if (lang == Language::english) {
        stopwords_ = load_word_list(data_dir / "stopwords_en.txt", kChecksumStopEn);
    } else {
        stopwords_ = load_word_list(data_dir / "stopwords_it.txt", kChecksumStopIt);
    }
    keywords_ = load_word_list(data_dir / "java_keywords.txt", kChecksumJavaKw);
}

Preprocessor::Preprocessor(Language lang, std::unordered_set<std::string> stopwords,
                           std::unordered_set<std::string> keywords)
    : lang_(lang), stopwords_(std::move(stopwords)), keywords_(std::move(keywords)) {}

std::string Preprocessor::stem(const std::string& lowercase_word) const {
    // iterated to a fixpoint so re-preprocessing already-stemmed text is a
    // no-op; almost every word converges in a single pass
    std::string word = lowercase_word;
    for (int i = 0; i < 4; ++i) {
        std::string next = lang_ == Language::english ? porter_stem(word)
                                                      : italian_stem(word);
        if (next == word) break;
        word = std::move(next);
    }
    return word;
}

std::vector<std::string> Preprocessor::preprocess(const std::string& raw_text) const {
    std::vector<std::string> out;
    for (auto& token : tokenize(raw_text)) {
        if (stopwords_.count(token) || keywords_.count(token)) continue;
        std::string stemmed = stem(token);
        if (!stemmed.empty()) out.push_back(std::move(stemmed));
    }
    return out;
}

std::unordered_set<std::string> load_word_list(const std::filesystem::path& file,
                                               std::uint64_t expected_checksum) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open word list: " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    if (expected_checksum != 0 && fnv1a(bytes) != expected_checksum) {
        throw DataError("word list checksum mismatch (file modified?): " + file.string());
    }
    std::unordered_set<std::string> words;
    std::istringstream lines(bytes);
    std::string line;
    while (std::getline(lines, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) words.insert(line);
    }
    return words;
}

std::filesystem::path find_data_dir(const std::string& explicit_dir) {
    namespace fs = std::filesystem;
    if (!explicit_dir.empty()) {
        if (!fs::is_directory(explicit_dir)) {
            throw ConfigError("data directory not found: " + explicit_dir);
        }
        return explicit_dir;
    }
    if (const char* env = std::getenv("TLR_DATA_DIR")) {
        if (fs::is_directory(env)) return env;
    }
    if (fs::is_directory("data")) return "data";
#ifdef TLR_SOURCE_DATA_DIR
    if (fs::is_directory(TLR_SOURCE_DATA_DIR)) return TLR_SOURCE_DATA_DIR;
#endif
    throw ConfigError("cannot locate the data directory; pass --data-dir");
}

}  // namespace tlr
