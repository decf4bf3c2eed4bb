#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tlr/balance.hpp"
#include "tlr/features.hpp"
#include "tlr/learn.hpp"
#include "tlr/retrieval.hpp"
#include "tlr/selection.hpp"
#include "tlr/stats.hpp"

namespace tlr {

struct ConfusionMatrix {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    long long total() const { return tp + fp + tn + fn; }
    long long predicted_positives() const { return tp + fp; }
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
};

/// P = tp/(tp+fp), R = tp/(tp+fn), F = 2PR/(P+R); empty denominators give 0.
Prf prf(const ConfusionMatrix& cm);

/// Stratified fold assignment: k disjoint index sets partitioning all rows,
/// per-fold positive counts within 1 of ceil(pos/k). Errors when the positive
/// class has fewer rows than folds.
std::vector<std::vector<std::size_t>> stratified_folds(
    const std::vector<std::uint8_t>& labels, int k, std::uint64_t seed);

enum class SelectionScope { fold, dataset };

struct PipelineConfig {
    SelectionMethod selection = SelectionMethod::correlation;
    double selection_threshold = 1e-6;
    SelectionScope selection_scope = SelectionScope::fold;
    RebalanceMethod rebalance = RebalanceMethod::smote;
    int smote_k = 5;
    Algorithm classifier = Algorithm::random_forest;
    Hyperparams hyperparams;
    int trials = 50;
    int folds = 10;
    std::uint64_t seed = 17;
    int jobs = 1;
};

/// Canonical text form (stable key order) used for config hashes.
std::string describe_pipeline(const PipelineConfig& config);

/// Short single-token label, e.g. "correlation+smote+random_forest".
std::string pipeline_label(const PipelineConfig& config);

struct TrialResult {
    int trial = 0;
    ConfusionMatrix confusion;  // aggregated over the trial's folds
    Prf scores;
};

struct CvReport {
    std::string dataset;
    std::string config_text;
    std::uint64_t config_hash = 0;
    int trials = 0;
    int folds = 0;
    std::vector<TrialResult> trial_results;
    std::vector<double> precision, recall, fscore;  // one entry per trial
    double mean_precision = 0.0, mean_recall = 0.0, mean_fscore = 0.0;
    double mean_predicted_positives = 0.0;
};

/// The repeated stratified-CV protocol: per trial a fresh fold split; per fold
/// the selection is fit on training rows only (unless scope=dataset), the
/// training rows are rebalanced, the classifier trained, and the held-out
/// rows predicted. Trials run in parallel on derived seeds.
CvReport run_cv(const FeatureMatrix& matrix, const PipelineConfig& config,
                const std::string& dataset_name);

struct IrBaselineResult {
    IrModel model = IrModel::vsm;
    long long cut_point = 0;
    ConfusionMatrix confusion;
    Prf scores;
};

/// Scores of every candidate pair under one model (source queries the target
/// corpus), in link order. LM log probabilities are converted to per-token
/// log-likelihood ratios against the collection model so they pool across
/// queries; the per-query ranking is unchanged by that transform.
std::vector<double> pooled_scores_for_model(const TraceDataset& dataset,
                                            const CorpusModels& models, IrModel model);

/// All seven models' pooled pair scores, indexed [model][pair].
std::vector<std::vector<double>> pooled_pair_scores(const TraceDataset& dataset,
                                                    const CorpusModels& models);

/// IR baseline evaluated from pooled scores: top K labeled valid, ties
/// resolve in link order, i.e. ascending (source_id, target_id).
IrBaselineResult ir_baseline_from_scores(const std::vector<double>& scores,
                                         const std::vector<std::uint8_t>& labels,
                                         IrModel model, long long k);

IrBaselineResult best_ir_from_scores(const std::vector<std::vector<double>>& all_scores,
                                     const std::vector<std::uint8_t>& labels,
                                     long long k);

/// Pools all candidate pairs into one ranked list (source queries the target
/// corpus), labels the top K as valid, and scores against the oracle.
/// K is clamped to the candidate count.
IrBaselineResult ir_baseline_at_k(const TraceDataset& dataset,
                                  const CorpusModels& models, IrModel model,
                                  long long k);

/// The model with the highest baseline F at the cut point; ties resolve in
/// the fixed model order.
IrBaselineResult best_ir(const TraceDataset& dataset, const CorpusModels& models,
                         long long k);

struct MetricComparison {
    std::string metric;
    double ir_value = 0.0;
    double trail_mean = 0.0;
    double shapiro_p = 0.0;
    bool shapiro_degenerate = false;
    bool normal = false;
    std::string test;  // "t" or "wilcoxon"
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    double effect_size = 0.0;
    bool significant_win = false;  // adjusted p below alpha and mean above IR
};

struct CompareReport {
    std::string dataset;
    CvReport cv;
    IrBaselineResult ir;
    double alpha = 0.01;
    MetricComparison precision, recall, fscore;
};

/// RQ2 machinery: Shapiro-Wilk at `alpha` routes each metric to the one-sample
/// t test or the one-sample Wilcoxon signed-rank test against the IR value;
/// Holm adjusts the three metric p-values together.
CompareReport compare_vs_ir(const TraceDataset& dataset, const CorpusModels& models,
                            const CvReport& cv, double alpha = 0.01);

/// Same comparison driven by precomputed pooled pair scores (see
/// pooled_pair_scores); used when the heavy retrieval state is cached.
CompareReport compare_vs_ir_scores(const std::string& dataset_name,
                                   const std::vector<std::vector<double>>& pooled_scores,
                                   const std::vector<std::uint8_t>& labels,
                                   const CvReport& cv, double alpha = 0.01);

// report emission
void save_cv_report_json(const CvReport& report, const std::filesystem::path& file);
void append_trials_csv(const CvReport& report, const std::string& config_label,
                       std::ostream& out, bool header);
void save_compare_markdown(const std::vector<CompareReport>& reports,
                           const std::filesystem::path& file);
void save_compare_json(const std::vector<CompareReport>& reports,
                       const std::filesystem::path& file);

struct GridCell {
    RebalanceMethod rebalance = RebalanceMethod::none;
    SelectionMethod selection = SelectionMethod::none;
    Algorithm classifier = Algorithm::knn5;
    double mean_fscore = 0.0;          // averaged over datasets
    std::vector<double> pooled_fscores;  // trial values across datasets
    double p_vs_best = 1.0;            // Mann-Whitney, Holm-adjusted
    double cliffs = 0.0;
};

struct GridReport {
    std::vector<GridCell> cells;
    std::size_t best_cell = 0;
};

/// Ranks every (rebalance, selection, classifier) combination by mean F and
/// tests each against the best with Mann-Whitney + Holm + Cliff's delta.
GridReport grid_compare(std::vector<GridCell> cells);

void save_grid_markdown(const GridReport& report,
                        const std::vector<RebalanceMethod>& rebalancers,
                        const std::vector<SelectionMethod>& selections,
                        const std::vector<Algorithm>& classifiers,
                        const std::filesystem::path& file);
void save_grid_json(const GridReport& report, const std::filesystem::path& file);

}  // namespace tlr
