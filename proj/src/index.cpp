#include "tlr/index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tlr/common.hpp"

namespace tlr {

namespace {

constexpr double kLog2 = 0.6931471805599453;

double entropy_term_bits(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

}  // namespace

int TermIndex::term_id(const std::string& term) const {
    const auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term) return -1;
    return static_cast<int>(it - terms.begin());
}

double TermIndex::idf(int term) const {
    return std::log(static_cast<double>(num_docs) / doc_freq[term]);
}

double TermIndex::collection_prob(int term) const {
    return static_cast<double>(collection_freq[term]) / static_cast<double>(total_tokens);
}

TermIndex build_index(std::span<const Artifact> artifacts) {
    TermIndex index;
    index.num_docs = static_cast<int>(artifacts.size());
    index.doc_ids.reserve(artifacts.size());

    std::map<std::string, std::vector<DocCount>> vocab;  // sorted vocabulary
    for (int d = 0; d < index.num_docs; ++d) {
        index.doc_ids.push_back(artifacts[d].id);
        std::map<std::string, int> counts;
        for (const auto& token : artifacts[d].tokens) ++counts[token];
        for (const auto& [term, count] : counts) {
            vocab[term].push_back({d, count});
        }
        index.doc_length.push_back(static_cast<int>(artifacts[d].tokens.size()));
        index.total_tokens += static_cast<long long>(artifacts[d].tokens.size());
    }

    index.terms.reserve(vocab.size());
    index.postings.reserve(vocab.size());
    index.docs.assign(index.num_docs, {});
    for (auto& [term, posting] : vocab) {
        const int t = static_cast<int>(index.terms.size());
        index.terms.push_back(term);
        index.doc_freq.push_back(static_cast<int>(posting.size()));
        long long cf = 0;
        for (const auto& dc : posting) {
            cf += dc.count;
            index.docs[dc.doc].push_back({t, dc.count});
        }
        index.collection_freq.push_back(cf);
        index.postings.push_back(std::move(posting));
    }
    index.avg_doc_length = index.num_docs > 0
                               ? static_cast<double>(index.total_tokens) / index.num_docs
                               : 0.0;
    return index;
}

IndexedQuery make_query(const TermIndex& index, std::span<const std::string> tokens) {
    IndexedQuery q;
    q.total_tokens = static_cast<int>(tokens.size());
    std::map<std::string, int> counts;
    for (const auto& token : tokens) ++counts[token];
    for (const auto& [term, count] : counts) {
        const int t = index.term_id(term);
        if (t >= 0) {
            q.terms.push_back({t, count});
        } else {
            q.novel_counts.push_back(count);
        }
    }
    // map iteration is sorted by term string; re-sort by id for merge scans
    std::sort(q.terms.begin(), q.terms.end(),
              [](const TermCount& a, const TermCount& b) { return a.term < b.term; });
    return q;
}

DocView doc_view(const TermIndex& index, int doc) {
    return DocView{index.docs[doc], index.doc_length[doc]};
}

double vsm_score(const TermIndex& index, const IndexedQuery& query, DocView doc) {
    double dot = 0.0, qnorm = 0.0, dnorm = 0.0;
    auto qi = query.terms.begin();
    auto di = doc.terms.begin();
    while (qi != query.terms.end() && di != doc.terms.end()) {
        if (qi->term < di->term) {
            const double w = qi->count * index.idf(qi->term);
            qnorm += w * w;
            ++qi;
        } else if (di->term < qi->term) {
            const double w = di->count * index.idf(di->term);
            dnorm += w * w;
            ++di;
        } else {
            const double idf = index.idf(qi->term);
            const double wq = qi->count * idf;
            const double wd = di->count * idf;
            dot += wq * wd;
            qnorm += wq * wq;
            dnorm += wd * wd;
            ++qi;
            ++di;
        }
    }
    for (; qi != query.terms.end(); ++qi) {
        const double w = qi->count * index.idf(qi->term);
        qnorm += w * w;
    }
    for (; di != doc.terms.end(); ++di) {
        const double w = di->count * index.idf(di->term);
        dnorm += w * w;
    }
    if (qnorm <= 0.0 || dnorm <= 0.0) return 0.0;
    return dot / (std::sqrt(qnorm) * std::sqrt(dnorm));
}

double js_similarity_views(DocView a, DocView b, std::span<const int> a_extra,
                           std::span<const int> b_extra) {
    long long a_len = a.length, b_len = b.length;
    if (a_len <= 0 || b_len <= 0) return 0.0;

    double h_mix = 0.0, h_a = 0.0, h_b = 0.0;
    auto ai = a.terms.begin();
    auto bi = b.terms.begin();
    auto emit = [&](double pa, double pb) {
        h_a += entropy_term_bits(pa);
        h_b += entropy_term_bits(pb);
        h_mix += entropy_term_bits(0.5 * (pa + pb));
    };
    while (ai != a.terms.end() && bi != b.terms.end()) {
        if (ai->term < bi->term) {
            emit(static_cast<double>(ai->count) / a_len, 0.0);
            ++ai;
        } else if (bi->term < ai->term) {
            emit(0.0, static_cast<double>(bi->count) / b_len);
            ++bi;
        } else {
            emit(static_cast<double>(ai->count) / a_len,
                 static_cast<double>(bi->count) / b_len);
            ++ai;
            ++bi;
        }
    }
    for (; ai != a.terms.end(); ++ai) emit(static_cast<double>(ai->count) / a_len, 0.0);
    for (; bi != b.terms.end(); ++bi) emit(0.0, static_cast<double>(bi->count) / b_len);
    for (int c : a_extra) emit(static_cast<double>(c) / a_len, 0.0);
    for (int c : b_extra) emit(0.0, static_cast<double>(c) / b_len);

    const double divergence = h_mix - 0.5 * (h_a + h_b);
    return std::clamp(1.0 - divergence, 0.0, 1.0);
}

double js_score(const IndexedQuery& query, DocView doc) {
    const DocView query_view{query.terms, query.total_tokens};
    return js_similarity_views(query_view, doc, query.novel_counts, {});
}

double bm25_score(const TermIndex& index, const IndexedQuery& query, DocView doc,
                  const ModelConfig& config) {
    const double k1 = config.bm25_k1;
    const double b = config.bm25_b;
    const double len_ratio =
        index.avg_doc_length > 0.0 ? doc.length / index.avg_doc_length : 0.0;
    const double norm = k1 * ((1.0 - b) + b * len_ratio);

    double score = 0.0;
    auto qi = query.terms.begin();
    auto di = doc.terms.begin();
    while (qi != query.terms.end() && di != doc.terms.end()) {
        if (qi->term < di->term) {
            ++qi;
        } else if (di->term < qi->term) {
            ++di;
        } else {
            const double tf = di->count;
            score += index.idf(qi->term) * ((k1 + 1.0) * tf) / (tf + norm);
            ++qi;
            ++di;
        }
    }
    return score;
}

double lm_word_prob(const TermIndex& index, int term, DocView doc, LmKind kind,
                    const ModelConfig& config) {
    int tf = 0;
    const auto it = std::lower_bound(
        doc.terms.begin(), doc.terms.end(), term,
        [](const TermCount& tc, int t) { return tc.term < t; });
    if (it != doc.terms.end() && it->term == term) tf = it->count;

    const double p_coll = index.collection_prob(term);
    if (kind == LmKind::dirichlet) {
        const double mu = config.dirichlet_mu;
        return (tf + mu * p_coll) / (doc.length + mu);
    }
    const double lambda = config.jm_lambda;
    const double p_doc = doc.length > 0 ? static_cast<double>(tf) / doc.length : 0.0;
    return (1.0 - lambda) * p_doc + lambda * p_coll;
}

double lm_score(const TermIndex& index, const IndexedQuery& query, DocView doc,
                LmKind kind, const ModelConfig& config) {
    // sum over query token instances; terms absent from the collection were
    // dropped when the query was folded in, which keeps the score finite
    double score = 0.0;
    for (const auto& qt : query.terms) {
        score += qt.count * std::log(lm_word_prob(index, qt.term, doc, kind, config));
    }
    return score;
}

double vsm_similarity(const TermIndex& index, int d1, int d2) {
    IndexedQuery pseudo;
    pseudo.terms.assign(index.docs[d1].begin(), index.docs[d1].end());
    pseudo.total_tokens = index.doc_length[d1];
    return vsm_score(index, pseudo, doc_view(index, d2));
}

double js_similarity(const TermIndex& index, int d1, int d2) {
    return js_similarity_views(doc_view(index, d1), doc_view(index, d2));
}

std::vector<RankedDoc> rank_scores(std::vector<double> scores) {
    std::vector<RankedDoc> ranked(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        ranked[i] = {static_cast<int>(i), scores[i], 0};
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedDoc& a, const RankedDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    });
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        ranked[i].rank = static_cast<int>(i) + 1;
    }
    return ranked;
}

}  // namespace tlr
