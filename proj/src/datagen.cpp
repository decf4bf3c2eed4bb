#include "tlr/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tlr/common.hpp"

namespace tlr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Pseudo-word source: pronounceable, unique both literally and after
/// stemming, never colliding with stopwords or keywords.
class WordFactory {
public:
    WordFactory(Language lang, const Preprocessor& pre, Rng& rng)
        : lang_(lang), pre_(pre), rng_(rng) {}

    std::string fresh() {
        static const char* onsets[] = {"b",  "c",  "d",  "f",  "g",  "l",  "m",
                                       "n",  "p",  "r",  "s",  "t",  "v",  "z",
                                       "br", "cr", "dr", "fr", "gr", "pr", "st",
                                       "tr", "pl", "sc", "sp"};
        static const char* vowels[] = {"a", "e", "i", "o", "u"};
        static const char* codas_en[] = {"", "n", "r", "s", "l", "t", "x", "m"};
        for (int attempt = 0; attempt < 1000; ++attempt) {
            std::string word;
            const int syllables = 2 + static_cast<int>(rng_.below(2));
            for (int s = 0; s < syllables; ++s) {
                word += onsets[rng_.index(std::size(onsets))];
                word += vowels[rng_.index(std::size(vowels))];
                if (lang_ == Language::english) {
                    word += codas_en[rng_.index(std::size(codas_en))];
                }
            }
            if (lang_ == Language::italian && rng_.below(3) == 0) word += "re";
            if (word.size() < 4) continue;
            const auto processed = pre_.preprocess(word);
            if (processed.size() != 1) continue;  // stopword, keyword or stemmed away
            const std::string& stem = processed.front();
            if (!used_words_.insert(word).second) continue;
            if (!used_stems_.insert(stem).second) {
                used_words_.erase(word);
                continue;
            }
            return word;
        }
        throw InternalError("word factory exhausted");
    }

    std::vector<std::string> batch(std::size_t n) {
        std::vector<std::string> words(n);
        for (auto& w : words) w = fresh();
        return words;
    }

private:
    Language lang_;
    const Preprocessor& pre_;
    Rng& rng_;
    std::set<std::string> used_words_;
    std::set<std::string> used_stems_;
};

// ---------------------------------------------------------------------------
// raw-text rendering: the token multiset is authoritative, the surrounding
// syntax exists to exercise the preprocessing pipeline
// ---------------------------------------------------------------------------

std::string camel_join(const std::vector<std::string>& words, std::size_t begin,
                       std::size_t count, bool capitalize_first) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        std::string w = words[begin + i];
        if (i > 0 || capitalize_first) w[0] = static_cast<char>(std::toupper(w[0]));
        out += w;
    }
    return out;
}

std::string render_code(const std::vector<std::string>& tokens, Rng& rng) {
    std::ostringstream out;
    std::size_t at = 0;
    const std::size_t class_words = std::min<std::size_t>(2, tokens.size());
    out << "public class " << camel_join(tokens, 0, class_words, true) << " {\n";
    at += class_words;
    while (at < tokens.size()) {
        const std::size_t method_words =
            std::min<std::size_t>(1 + rng.below(2), tokens.size() - at);
        out << "    private void " << camel_join(tokens, at, method_words, false)
            << "(int value" << rng.below(10) << ") {\n";
        at += method_words;
        int statements = 2 + static_cast<int>(rng.below(3));
        while (statements-- > 0 && at < tokens.size()) {
            const std::size_t var_words =
                std::min<std::size_t>(1 + rng.below(3), tokens.size() - at);
            out << "        this." << camel_join(tokens, at, var_words, false)
                << " = " << rng.below(100) << ";\n";
            at += var_words;
        }
        out << "    }\n";
    }
    out << "}\n";
    return out.str();
}

std::string render_prose(const std::vector<std::string>& tokens, Language lang,
                         Rng& rng) {
    static const char* fill_en[] = {"the", "a", "of", "to", "and", "when", "with",
                                    "for", "should", "be", "by", "from"};
    static const char* fill_it[] = {"il", "la", "di", "e", "per", "con", "che",
                                    "un", "una", "del", "nel", "quando"};
    std::ostringstream out;
    std::size_t at = 0;
    int sentence = 1;
    while (at < tokens.size()) {
        out << sentence++ << ". ";
        const std::size_t words = std::min<std::size_t>(6 + rng.below(7), tokens.size() - at);
        for (std::size_t i = 0; i < words; ++i) {
            if (rng.below(3) == 0) {
                out << (lang == Language::english
                            ? fill_en[rng.index(std::size(fill_en))]
                            : fill_it[rng.index(std::size(fill_it))])
                    << ' ';
            }
            std::string w = tokens[at++];
            if (i == 0) w[0] = static_cast<char>(std::toupper(w[0]));
            out << w << (i + 1 < words ? " " : "");
        }
        out << ".\n";
    }
    return out.str();
}

bool kind_is_code(const std::string& kind) { return kind == "CC"; }

std::string artifact_filename(const std::string& kind, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%03d.txt", kind.c_str(), i + 1);
    return buf;
}

}  // namespace

const std::vector<SyntheticDatasetSpec>& standard_datasets() {
    static const std::vector<SyntheticDatasetSpec> specs = [] {
        std::vector<SyntheticDatasetSpec> v;
        auto add = [&](std::string name, std::string display, Language lang,
                       std::string src_kind, std::string tgt_kind, int ns, int nt,
                       int valid, std::uint64_t seed, double signal, double weak,
                       double boiler, double distract, double cluster_id) {
            SyntheticDatasetSpec s;
            s.name = std::move(name);
            s.display = std::move(display);
            s.language = lang;
            s.source_kind = std::move(src_kind);
            s.target_kind = std::move(tgt_kind);
            s.num_sources = ns;
            s.num_targets = nt;
            s.num_valid = valid;
            s.seed = seed;
            s.signal_strength = signal;
            s.weak_link_rate = weak;
            s.boiler_ratio = boiler;
            s.distractor_rate = distract;
            s.cluster_identity = cluster_id;
            v.push_back(std::move(s));
        };
        const Language it = Language::italian;
        const Language en = Language::english;
        // shapes follow the benchmark suite: candidates = |S1| x |S2|,
        // invalid = candidates - valid
        add("eanci_cc_uc", "eAnci(CC-UC)", it, "CC", "UC", 139, 55, 554, 101,
            0.30, 0.42, 0.42, 5.0, 0.50);
        add("easyclinic_cc_uc", "EasyClinic(CC-UC)", it, "CC", "UC", 47, 30, 93, 102,
            0.55, 0.16, 0.26, 2.0, 0.25);
        add("easyclinic_id_cc", "EasyClinic(ID-CC)", it, "ID", "CC", 20, 47, 69, 103,
            0.52, 0.18, 0.28, 2.5, 0.30);
        add("easyclinic_id_tc", "EasyClinic(ID-TC)", it, "ID", "TC", 20, 63, 83, 104,
            0.76, 0.05, 0.22, 2.5, 0.30);
        add("easyclinic_id_uc", "EasyClinic(ID-UC)", it, "ID", "UC", 20, 30, 26, 105,
            0.45, 0.25, 0.32, 3.0, 0.35);
        add("easyclinic_tc_cc", "EasyClinic(TC-CC)", it, "TC", "CC", 63, 47, 204, 106,
            0.85, 0.03, 0.18, 3.5, 0.35);
        add("easyclinic_tc_uc", "EasyClinic(TC-UC)", it, "TC", "UC", 63, 30, 63, 107,
            0.78, 0.05, 0.22, 3.5, 0.30);
        add("etour_cc_uc", "eTour(CC-UC)", it, "CC", "UC", 116, 58, 365, 108,
            0.45, 0.22, 0.32, 3.0, 0.30);
        add("itrust_cc_uc", "iTrust(CC-UC)", en, "CC", "UC", 47, 33, 58, 109,
            0.48, 0.20, 0.30, 2.5, 0.30);
        add("modis_highr_lowr", "Modis(HighR-LowR)", en, "HighR", "LowR", 19, 49, 41,
            110, 0.42, 0.28, 0.40, 4.0, 0.45);
        add("smos_cc_uc", "SMOS(CC-UC)", it, "CC", "UC", 100, 67, 1044, 111,
            0.38, 0.30, 0.38, 4.5, 0.45);
        return v;
    }();
    return specs;
}

void generate_dataset(const SyntheticDatasetSpec& spec, const Preprocessor& pre,
                      const fs::path& out_dir) {
    if (spec.num_sources < 1 || spec.num_targets < 1 ||
        spec.num_valid > spec.num_sources * spec.num_targets) {
        throw ConfigError("invalid dataset shape for " + spec.name);
    }
    Rng rng(spec.seed);
    WordFactory words(spec.language, pre, rng);

    const int num_sources = spec.num_sources;
    const int num_targets = spec.num_targets;

    // shared vocabulary pools
    const auto boiler = words.batch(40);
    const int num_clusters = std::max(2, static_cast<int>(std::sqrt(num_targets)));
    std::vector<std::vector<std::string>> cluster_words(num_clusters);
    for (auto& c : cluster_words) c = words.batch(8);

    // identity words are partially drawn from the cluster pool, so vocabulary
    // collides inside a cluster the way related artifacts really do
    std::vector<std::vector<std::string>> target_identity(num_targets);
    std::vector<int> target_cluster(num_targets);
    for (int t = 0; t < num_targets; ++t) {
        target_cluster[t] = static_cast<int>(rng.below(num_clusters));
        const auto& cluster = cluster_words[target_cluster[t]];
        for (int w = 0; w < 6; ++w) {
            if (rng.uniform() < spec.cluster_identity) {
                target_identity[t].push_back(cluster[rng.index(cluster.size())]);
            } else {
                target_identity[t].push_back(words.fresh());
            }
        }
    }
    std::vector<std::vector<std::string>> source_identity(num_sources);
    std::vector<int> source_cluster(num_sources);
    for (int s = 0; s < num_sources; ++s) {
        source_identity[s] = words.batch(3);
        source_cluster[s] = static_cast<int>(rng.below(num_clusters));
    }

    // oracle: spread num_valid links over the sources with jitter, then draw
    // targets mostly from the source's home cluster
    std::vector<int> degree(num_sources, spec.num_valid / num_sources);
    {
        std::vector<int> order(num_sources);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (int r = 0; r < spec.num_valid % num_sources; ++r) ++degree[order[r]];
        for (int jitter = 0; jitter < num_sources / 3; ++jitter) {
            const int a = static_cast<int>(rng.below(num_sources));
            const int b = static_cast<int>(rng.below(num_sources));
            if (degree[a] > 0 && degree[b] < num_targets) {
                --degree[a];
                ++degree[b];
            }
        }
    }
    std::vector<int> home_targets_scratch, other_targets_scratch;
    std::vector<std::set<int>> links(num_sources);
    for (int s = 0; s < num_sources; ++s) {
        home_targets_scratch.clear();
        other_targets_scratch.clear();
        for (int t = 0; t < num_targets; ++t) {
            (target_cluster[t] == source_cluster[s] ? home_targets_scratch
                                                    : other_targets_scratch)
                .push_back(t);
        }
        rng.shuffle(home_targets_scratch);
        rng.shuffle(other_targets_scratch);
        std::size_t home_at = 0, other_at = 0;
        while (static_cast<int>(links[s].size()) < degree[s]) {
            const bool prefer_home = rng.below(10) < 7;
            int pick = -1;
            if (prefer_home && home_at < home_targets_scratch.size()) {
                pick = home_targets_scratch[home_at++];
            } else if (other_at < other_targets_scratch.size()) {
                pick = other_targets_scratch[other_at++];
            } else if (home_at < home_targets_scratch.size()) {
                pick = home_targets_scratch[home_at++];
            } else {
                break;
            }
            links[s].insert(pick);
        }
    }

    // token multisets; artifact sizes correlate within a cluster, so linked
    // pairs (mostly intra-cluster) have compatible sizes
    std::vector<double> cluster_scale(num_clusters);
    for (auto& scale : cluster_scale) scale = 0.7 + 0.9 * rng.uniform();
    auto draw_length = [&](int cluster) {
        const int base =
            spec.doc_len_min +
            static_cast<int>(rng.below(spec.doc_len_max - spec.doc_len_min + 1));
        return std::max(12, static_cast<int>(base * cluster_scale[cluster] *
                                             (0.8 + 0.45 * rng.uniform())));
    };
    auto add_repeats = [&](std::vector<std::string>& tokens, const std::string& w,
                           int reps) {
        for (int r = 0; r < reps; ++r) tokens.push_back(w);
    };

    std::vector<std::vector<std::string>> target_tokens(num_targets);
    for (int t = 0; t < num_targets; ++t) {
        auto& tokens = target_tokens[t];
        const bool stub = rng.below(100) < 8;  // a few sparse, hard artifacts
        const int length = stub ? 18 : draw_length(target_cluster[t]);
        for (const auto& w : target_identity[t]) {
            add_repeats(tokens, w, 2 + static_cast<int>(rng.below(2)));
        }
        const auto& cluster = cluster_words[target_cluster[t]];
        for (std::uint64_t i = 0, n = 2 + rng.below(3); i < n; ++i) {
            tokens.push_back(cluster[rng.index(cluster.size())]);
        }
        const double boiler_mult = 0.4 + 2.2 * rng.uniform();
        const int boiler_count =
            static_cast<int>(spec.boiler_ratio * boiler_mult * length);
        for (int i = 0; i < boiler_count; ++i) {
            tokens.push_back(boiler[rng.index(boiler.size())]);
        }
        while (static_cast<int>(tokens.size()) < length) {
            add_repeats(tokens, words.fresh(), 1 + static_cast<int>(rng.below(2)));
        }
        rng.shuffle(tokens);
    }

    std::vector<std::vector<std::string>> source_tokens(num_sources);
    for (int s = 0; s < num_sources; ++s) {
        auto& tokens = source_tokens[s];
        const int length = draw_length(source_cluster[s]);
        for (const auto& w : source_identity[s]) {
            add_repeats(tokens, w, 1 + static_cast<int>(rng.below(2)));
        }
        const auto& cluster = cluster_words[source_cluster[s]];
        for (std::uint64_t i = 0, n = 1 + rng.below(3); i < n; ++i) {
            tokens.push_back(cluster[rng.index(cluster.size())]);
        }
        // valid links share several distinct identity words; weak links fall
        // back to one or two and are genuinely hard to spot
        for (const int t : links[s]) {
            const bool weak = rng.uniform() < spec.weak_link_rate;
            const double strength = spec.signal_strength * (0.6 + 0.8 * rng.uniform());
            int copy = weak ? 1 + static_cast<int>(rng.below(2))
                            : std::max(2, static_cast<int>(std::lround(strength * 6.0)));
            copy = std::min<int>(copy, static_cast<int>(target_identity[t].size()));
            std::vector<int> pick(target_identity[t].size());
            std::iota(pick.begin(), pick.end(), 0);
            rng.shuffle(pick);
            for (int i = 0; i < copy; ++i) {
                add_repeats(tokens, target_identity[t][pick[i]],
                            weak ? 1 : 1 + static_cast<int>(rng.below(2)));
            }
        }
        // distractor borrowings: one identity word of a non-linked target,
        // repeated; inflates similarity scores while the distinct-term
        // overlap stays thin
        const double expected = spec.distractor_rate * (0.5 + rng.uniform());
        int distractors = static_cast<int>(expected);
        if (rng.uniform() < expected - distractors) ++distractors;
        for (int d = 0; d < distractors; ++d) {
            const int t = static_cast<int>(rng.below(num_targets));
            if (links[s].count(t)) continue;
            const auto& word =
                target_identity[t][rng.index(target_identity[t].size())];
            add_repeats(tokens, word, 1 + static_cast<int>(rng.below(3)));
            if (rng.below(5) == 0) {  // occasionally a second word
                tokens.push_back(
                    target_identity[t][rng.index(target_identity[t].size())]);
            }
        }
        const double boiler_mult = 0.4 + 2.2 * rng.uniform();
        const int boiler_count =
            static_cast<int>(spec.boiler_ratio * boiler_mult * length);
        for (int i = 0; i < boiler_count; ++i) {
            tokens.push_back(boiler[rng.index(boiler.size())]);
        }
        while (static_cast<int>(tokens.size()) < length) {
            add_repeats(tokens, words.fresh(), 1 + static_cast<int>(rng.below(2)));
        }
        rng.shuffle(tokens);
    }

    // write everything
    fs::create_directories(out_dir / "source");
    fs::create_directories(out_dir / "target");
    auto write_artifact = [&](const fs::path& file, const std::vector<std::string>& tokens,
                              const std::string& kind) {
        std::ofstream out(file);
        if (!out) throw DataError("cannot write artifact: " + file.string());
        out << (kind_is_code(kind) ? render_code(tokens, rng)
                                   : render_prose(tokens, spec.language, rng));
    };
    for (int s = 0; s < num_sources; ++s) {
        write_artifact(out_dir / "source" / artifact_filename(spec.source_kind, s),
                       source_tokens[s], spec.source_kind);
    }
    for (int t = 0; t < num_targets; ++t) {
        write_artifact(out_dir / "target" / artifact_filename(spec.target_kind, t),
                       target_tokens[t], spec.target_kind);
    }

    std::ofstream answers(out_dir / "answers.txt");
    if (!answers) throw DataError("cannot write answers.txt in " + out_dir.string());
    long long written = 0;
    for (int s = 0; s < num_sources; ++s) {
        const std::string src_id =
            fs::path(artifact_filename(spec.source_kind, s)).stem().string();
        for (const int t : links[s]) {
            answers << src_id << '\t'
                    << fs::path(artifact_filename(spec.target_kind, t)).stem().string()
                    << '\n';
            ++written;
        }
    }
    if (written != spec.num_valid) {
        throw InternalError("generated oracle size mismatch for " + spec.name + ": " +
                            std::to_string(written) + " links");
    }

    json meta{{"name", spec.name},
              {"display", spec.display},
              {"language", language_name(spec.language)},
              {"source_kind", spec.source_kind},
              {"target_kind", spec.target_kind}};
    std::ofstream meta_out(out_dir / "meta.json");
    meta_out << meta.dump(2) << '\n';
}

}  // namespace tlr
