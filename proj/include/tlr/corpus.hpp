#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tlr/text.hpp"

namespace tlr {

enum class Side { source, target };

/// One preprocessed document.
struct Artifact {
    std::string id;  // file stem, unique within its side
    Side side = Side::source;
    std::string raw_text;
    std::vector<std::string> tokens;
    bool empty_after_preprocessing = false;
};

/// An ordered (source, target) pair; label true iff the pair is in the oracle.
struct CandidateLink {
    std::string source_id;
    std::string target_id;
    bool label = false;
};

/// Two artifact sets plus the valid-link oracle.
struct TraceDataset {
    std::string name;
    Language language = Language::english;
    std::vector<Artifact> sources;
    std::vector<Artifact> targets;
    std::set<std::pair<std::string, std::string>> valid_links;

    std::size_t candidate_count() const { return sources.size() * targets.size(); }
    std::size_t valid_count() const { return valid_links.size(); }
    std::size_t invalid_count() const { return candidate_count() - valid_count(); }

    const Artifact* find(Side side, const std::string& id) const;
};

/// Reads `source/`, `target/` and `answers.txt` from a dataset directory,
/// preprocessing every file. Artifact order is sorted by id. The answer file
/// is one `source_id<TAB>target_id` per line; unknown ids are a hard error.
TraceDataset load_dataset(const std::filesystem::path& dir, const Preprocessor& pre,
                          const std::string& name = "");

/// All |S1|x|S2| candidate links, sorted by (source_id, target_id) and
/// labeled from the oracle.
std::vector<CandidateLink> enumerate_links(const TraceDataset& dataset);

/// Debug dump: one JSON object per artifact (id, side, tokens).
void dump_tokens_jsonl(const TraceDataset& dataset, const std::filesystem::path& file);

/// Reads `meta.json` next to a dataset if present; returns the language
/// recorded there, or `fallback` when the file is missing.
Language dataset_language_hint(const std::filesystem::path& dir, Language fallback);

/// Fingerprint of ids, raw text and oracle; cache keys include it so stale
/// caches are never silently reused after the data changes.
std::uint64_t dataset_content_hash(const TraceDataset& dataset);

}  // namespace tlr
