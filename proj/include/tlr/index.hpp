#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tlr/corpus.hpp"

namespace tlr {

/// (term id, occurrence count), the unit of sparse document storage.
struct TermCount {
    int term;
    int count;
};

/// Per-document entry in a posting list.
struct DocCount {
    int doc;
    int count;
};

/// Inverted statistics over one artifact set. Vocabulary order is the sorted
/// term order, document order is the (sorted) artifact order it was built from.
struct TermIndex {
    std::vector<std::string> terms;
    std::vector<std::string> doc_ids;
    std::vector<std::vector<TermCount>> docs;      // per doc, sorted by term id
    std::vector<std::vector<DocCount>> postings;   // per term, sorted by doc
    std::vector<int> doc_freq;
    std::vector<long long> collection_freq;
    std::vector<int> doc_length;
    long long total_tokens = 0;
    double avg_doc_length = 0.0;
    int num_docs = 0;

    int term_id(const std::string& term) const;
    double idf(int term) const;                    // ln(N / df)
    double collection_prob(int term) const;        // cf / total_tokens
};

TermIndex build_index(std::span<const Artifact> artifacts);

/// Retrieval parameters. Defaults follow the shipped configuration.
struct ModelConfig {
    int lsa_rank = 100;
    int lda_topics = 250;
    double lda_alpha = 0.0;  // 0 means 50 / lda_topics
    double lda_beta = 0.01;
    int lda_iterations = 1000;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    double dirichlet_mu = 2000.0;
    double jm_lambda = 0.1;
    std::uint64_t rng_seed = 17;

    double lda_alpha_value() const {
        return lda_alpha > 0.0 ? lda_alpha : 50.0 / static_cast<double>(lda_topics);
    }
};

/// A query folded into an index's vocabulary. Terms missing from the index are
/// kept only as counts: they matter for JS distributions and query length.
struct IndexedQuery {
    std::vector<TermCount> terms;     // indexed terms, sorted by term id
    std::vector<int> novel_counts;    // counts of query terms absent from the index
    int total_tokens = 0;             // full preprocessed query length

    int indexed_distinct() const { return static_cast<int>(terms.size()); }
};

IndexedQuery make_query(const TermIndex& index, std::span<const std::string> tokens);

/// A document as the scorers see it: either an indexed doc or a perturbed bag.
struct DocView {
    std::span<const TermCount> terms;  // sorted by term id
    int length = 0;
};

DocView doc_view(const TermIndex& index, int doc);

enum class LmKind { dirichlet, jelinek_mercer };

// Query-document scoring. TF-IDF weights are tf * ln(N/df) throughout.
double vsm_score(const TermIndex& index, const IndexedQuery& query, DocView doc);
double js_score(const IndexedQuery& query, DocView doc);
double bm25_score(const TermIndex& index, const IndexedQuery& query, DocView doc,
                  const ModelConfig& config);
double lm_score(const TermIndex& index, const IndexedQuery& query, DocView doc,
                LmKind kind, const ModelConfig& config);

/// Smoothed p(w|d) for one indexed term; exposed for the property tests.
double lm_word_prob(const TermIndex& index, int term, DocView doc, LmKind kind,
                    const ModelConfig& config);

// Document-document similarities within one index.
double vsm_similarity(const TermIndex& index, int d1, int d2);
double js_similarity(const TermIndex& index, int d1, int d2);

/// Jensen-Shannon similarity of two term distributions, entropy in bits:
/// 1 - [H((P+Q)/2) - (H(P)+H(Q))/2]. Inputs are term-count bags; ids of
/// `a_extra`/`b_extra` are guaranteed distinct from everything else.
double js_similarity_views(DocView a, DocView b, std::span<const int> a_extra = {},
                           std::span<const int> b_extra = {});

struct RankedDoc {
    int doc;
    double score;
    int rank;  // 1-based, ties broken by ascending doc id
};

/// Sorts precomputed scores into a ranked list (descending score, doc id ties).
std::vector<RankedDoc> rank_scores(std::vector<double> scores);

}  // namespace tlr
