#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

namespace tlr {

enum class Language { english, italian };

Language parse_language(const std::string& name);
std::string language_name(Language lang);

/// The artifact preprocessing pipeline, applied in order:
///   1. split on whitespace, punctuation and digits
///   2. split identifiers on camelCase boundaries and underscores
///   3. lowercase
///   4. drop stopwords of the language and Java keywords
///   5. stem (Porter for English, Snowball Italian otherwise)
class Preprocessor {
public:
    /// Loads the shipped stoplists from `data_dir` and verifies their checksums.
    Preprocessor(Language lang, const std::filesystem::path& data_dir);

    /// In-memory lists; used by tests and by callers that manage their own data.
    Preprocessor(Language lang, std::unordered_set<std::string> stopwords,
                 std::unordered_set<std::string> keywords);

    std::vector<std::string> preprocess(const std::string& raw_text) const;

    Language language() const { return lang_; }

    std::string stem(const std::string& lowercase_word) const;

private:
    Language lang_;
    std::unordered_set<std::string> stopwords_;
    std::unordered_set<std::string> keywords_;
};

/// Splits raw text into identifier-split, lowercased word tokens (steps 1-3).
std::vector<std::string> tokenize(const std::string& raw_text);

/// Reads a one-word-per-line list; `expected_checksum` (FNV-1a of the raw
/// bytes) guards against silently edited stoplists. Zero skips the check.
std::unordered_set<std::string> load_word_list(const std::filesystem::path& file,
                                               std::uint64_t expected_checksum);

/// Locates the data directory: explicit argument, TLR_DATA_DIR, ./data.
std::filesystem::path find_data_dir(const std::string& explicit_dir);

}  // namespace tlr
