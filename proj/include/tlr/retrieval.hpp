#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "tlr/corpus.hpp"
#include "tlr/index.hpp"
#include "tlr/lda.hpp"
#include "tlr/lsa.hpp"

namespace tlr {

enum class IrModel { vsm, lsa, lda, js, bm25, lm_dirichlet, lm_jm };

inline constexpr std::array<IrModel, 7> kAllIrModels{
    IrModel::vsm, IrModel::lsa, IrModel::lda, IrModel::js,
    IrModel::bm25, IrModel::lm_dirichlet, IrModel::lm_jm};

/// The five models used for post-retrieval query quality (no LSA/LDA: both
/// would need re-fitting under document perturbation).
inline constexpr std::array<IrModel, 5> kPostQqModels{
    IrModel::vsm, IrModel::js, IrModel::bm25, IrModel::lm_dirichlet, IrModel::lm_jm};

std::string ir_model_name(IrModel model);
IrModel parse_ir_model(const std::string& name);

/// Everything derived from one dataset's text: a per-side term index and LSA
/// factorization, one LDA fit over all artifacts, and cached within-side
/// VSM similarity matrices. Immutable once constructed; reads are thread-safe.
class CorpusModels {
public:
    CorpusModels(const TraceDataset& dataset, const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    const TermIndex& index(Side corpus_side) const {
        return corpus_side == Side::source ? source_index_ : target_index_;
    }
    const LsaModel& lsa(Side corpus_side) const {
        return corpus_side == Side::source ? lsa_source_ : lsa_target_;
    }

    /// Document-topic distribution of an artifact (by position within its side).
    const std::vector<double>& theta(Side side, int position) const;

    /// Scores every document of `corpus_side` against a query artifact from the
    /// opposite side. Vector order matches the index's document order.
    std::vector<double> score_all(IrModel model, Side corpus_side,
                                  const Artifact& query, int query_position) const;

    /// score_all + descending sort with doc-id tie break.
    std::vector<RankedDoc> rank(IrModel model, Side corpus_side, const Artifact& query,
                                int query_position) const;

    /// Within-side VSM similarity of two indexed documents (cached).
    double within_similarity(Side side, int d1, int d2) const;

    /// Query-independent per-term statistics used by pre-retrieval metrics.
    struct TermStats {
        std::vector<double> entropy;    // -sum p(d|t) ln p(d|t)
        std::vector<double> variance;   // of tf-idf weight across docs containing t
        std::vector<double> coherence;  // mean pairwise VSM sim of docs containing t
    };
    const TermStats& term_stats(Side side) const {
        return side == Side::source ? stats_source_ : stats_target_;
    }

private:
    ModelConfig config_;
    TermIndex source_index_, target_index_;
    LsaModel lsa_source_, lsa_target_;
    LdaModel lda_;  // fit over sources then targets
    int num_sources_ = 0;
    std::vector<double> sim_source_, sim_target_;  // packed symmetric matrices
    TermStats stats_source_, stats_target_;

    void build_side_cache(Side side);
};

}  // namespace tlr
