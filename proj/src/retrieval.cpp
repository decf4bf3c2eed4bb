#include "tlr/retrieval.hpp"

#include <cmath>

#include "tlr/common.hpp"

namespace tlr {

std::string ir_model_name(IrModel model) {
    switch (model) {
        case IrModel::vsm: return "vsm";
        case IrModel::lsa: return "lsa";
        case IrModel::lda: return "lda";
        case IrModel::js: return "js";
        case IrModel::bm25: return "bm25";
        case IrModel::lm_dirichlet: return "lm_dirichlet";
        case IrModel::lm_jm: return "lm_jm";
    }
    throw InternalError("unhandled IrModel");
}

IrModel parse_ir_model(const std::string& name) {
    for (const IrModel m : kAllIrModels) {
        if (ir_model_name(m) == name) return m;
    }
    throw ConfigError("unknown IR model: '" + name + "'");
}

CorpusModels::CorpusModels(const TraceDataset& dataset, const ModelConfig& config)
    : config_(config) {
    source_index_ = build_index(dataset.sources);
    target_index_ = build_index(dataset.targets);
    lsa_source_ = LsaModel(source_index_, config_);
    lsa_target_ = LsaModel(target_index_, config_);

    num_sources_ = static_cast<int>(dataset.sources.size());
    std::vector<std::vector<std::string>> all_docs;
    all_docs.reserve(dataset.sources.size() + dataset.targets.size());
    for (const auto& a : dataset.sources) all_docs.push_back(a.tokens);
    for (const auto& a : dataset.targets) all_docs.push_back(a.tokens);
    lda_ = LdaModel(all_docs, config_);

    build_side_cache(Side::source);
    build_side_cache(Side::target);
}

const std::vector<double>& CorpusModels::theta(Side side, int position) const {
    return lda_.theta(side == Side::source ? position : num_sources_ + position);
}

namespace {

// packed upper-triangular index for i < j
std::size_t pair_slot(int i, int j, int n) {
    return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
           (j - i - 1);
}

}  // namespace

void CorpusModels::build_side_cache(Side side) {
    const TermIndex& index = this->index(side);
    const int n = index.num_docs;
    auto& sim = side == Side::source ? sim_source_ : sim_target_;
    sim.assign(static_cast<std::size_t>(n) * (n - 1) / 2, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            sim[pair_slot(i, j, n)] = vsm_similarity(index, i, j);
        }
    }

    auto& stats = side == Side::source ? stats_source_ : stats_target_;
    const std::size_t v = index.terms.size();
    stats.entropy.assign(v, 0.0);
    stats.variance.assign(v, 0.0);
    stats.coherence.assign(v, 0.0);
    for (std::size_t t = 0; t < v; ++t) {
        const auto& posting = index.postings[t];
        const double cf = static_cast<double>(index.collection_freq[t]);
        const double idf = index.idf(static_cast<int>(t));

        double entropy = 0.0, mean_w = 0.0;
        for (const auto& dc : posting) {
            const double p = dc.count / cf;
            entropy -= p * std::log(p);
            mean_w += dc.count * idf;
        }
        stats.entropy[t] = entropy;
        mean_w /= static_cast<double>(posting.size());
        double var = 0.0;
        for (const auto& dc : posting) {
            const double diff = dc.count * idf - mean_w;
            var += diff * diff;
        }
        stats.variance[t] = var / static_cast<double>(posting.size());

        if (posting.size() >= 2) {
            double total = 0.0;
            for (std::size_t i = 0; i < posting.size(); ++i) {
                for (std::size_t j = i + 1; j < posting.size(); ++j) {
                    total += sim[pair_slot(posting[i].doc, posting[j].doc, n)];
                }
            }
            const double pairs =
                static_cast<double>(posting.size()) * (posting.size() - 1) / 2.0;
            stats.coherence[t] = total / pairs;
        }
    }
}

double CorpusModels::within_similarity(Side side, int d1, int d2) const {
    if (d1 == d2) return 1.0;
    const auto& sim = side == Side::source ? sim_source_ : sim_target_;
    const int n = index(side).num_docs;
    const int i = std::min(d1, d2), j = std::max(d1, d2);
    return sim[pair_slot(i, j, n)];
}

std::vector<double> CorpusModels::score_all(IrModel model, Side corpus_side,
                                            const Artifact& query,
                                            int query_position) const {
    const TermIndex& index = this->index(corpus_side);
    const Side query_side = corpus_side == Side::source ? Side::target : Side::source;
    std::vector<double> scores(index.num_docs, 0.0);

    switch (model) {
        case IrModel::lda: {
            const auto& q_theta = theta(query_side, query_position);
            for (int d = 0; d < index.num_docs; ++d) {
                scores[d] = hellinger_similarity(q_theta, theta(corpus_side, d));
            }
            return scores;
        }
        case IrModel::lsa: {
            const LsaModel& lsa = this->lsa(corpus_side);
            const auto query_rep = lsa.fold_in(index, make_query(index, query.tokens));
            for (int d = 0; d < index.num_docs; ++d) {
                scores[d] = lsa.similarity_to_query(query_rep, d);
            }
            return scores;
        }
        default:
            break;
    }

    const IndexedQuery q = make_query(index, query.tokens);
    for (int d = 0; d < index.num_docs; ++d) {
        const DocView doc = doc_view(index, d);
        switch (model) {
            case IrModel::vsm: scores[d] = vsm_score(index, q, doc); break;
            case IrModel::js: scores[d] = js_score(q, doc); break;
            case IrModel::bm25: scores[d] = bm25_score(index, q, doc, config_); break;
            case IrModel::lm_dirichlet:
                scores[d] = lm_score(index, q, doc, LmKind::dirichlet, config_);
                break;
            case IrModel::lm_jm:
                scores[d] = lm_score(index, q, doc, LmKind::jelinek_mercer, config_);
                break;
            default:
                throw InternalError("unhandled model in score_all");
        }
    }
    return scores;
}

std::vector<RankedDoc> CorpusModels::rank(IrModel model, Side corpus_side,
                                          const Artifact& query,
                                          int query_position) const {
    return rank_scores(score_all(model, corpus_side, query, query_position));
}

}  // namespace tlr
