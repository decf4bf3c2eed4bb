#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlr/retrieval.hpp"
#include "tlr/threadpool.hpp"

namespace tlr {

/// The fixed feature layout: 14 IR rank features, 21 pre-retrieval query
/// quality metrics per direction (42), 7 post-retrieval metrics for 5 models
/// and both directions (70), and 5 document statistics. 131 columns total.
struct FeatureSchema {
    static constexpr int kIrCount = 14;
    static constexpr int kPreQqCount = 42;
    static constexpr int kPostQqCount = 70;
    static constexpr int kDocStatCount = 5;
    static constexpr int kTotal = kIrCount + kPreQqCount + kPostQqCount + kDocStatCount;

    static constexpr int kPreMetricCount = 21;
    static constexpr int kPostMetricCount = 7;

    static const std::array<std::string, kPreMetricCount>& pre_metric_names();
    static const std::array<std::string, kPostMetricCount>& post_metric_names();

    /// All 131 column names in persistence order.
    static const std::vector<std::string>& column_names();
};

struct FeatureMatrix {
    std::vector<std::string> columns;
    std::vector<std::string> source_ids;
    std::vector<std::string> target_ids;
    std::vector<double> values;  // row-major
    std::vector<std::uint8_t> labels;

    std::size_t rows() const { return labels.size(); }
    std::size_t cols() const { return columns.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
};

/// Per-column min/max captured before normalization, for reuse on new links.
struct NormalizationBounds {
    std::vector<double> min;
    std::vector<double> max;
};

struct FeatureOptions {
    int result_depth = 50;          // list depth for post-retrieval metrics
    int robustness_repetitions = 10;
    double perturb_fraction = 0.1;  // tokens deleted per perturbed document
    bool include_post_qq = true;
    int jobs = 1;
};

/// Pre-retrieval metrics of one query against an index (21 values, schema
/// order). Queries with no indexed term yield all zeros.
std::array<double, FeatureSchema::kPreMetricCount> pre_retrieval_qq(
    const CorpusModels& models, Side corpus_side, const Artifact& query);

/// Post-retrieval metrics for one (query, model) pair at the configured depth.
std::array<double, FeatureSchema::kPostMetricCount> post_retrieval_qq(
    const CorpusModels& models, Side corpus_side, const Artifact& query,
    int query_position, IrModel model, const FeatureOptions& options,
    std::uint64_t perturb_seed);

/// The 5 document statistics for a pair of artifacts:
/// unique terms (source, target), total terms (source, target), term overlap.
std::array<double, FeatureSchema::kDocStatCount> doc_stats(const Artifact& source,
                                                           const Artifact& target);

/// The full pipeline: every candidate link featurized, then min-max
/// normalized per column (constant columns collapse to zero).
FeatureMatrix featurize(const TraceDataset& dataset, const CorpusModels& models,
                        const FeatureOptions& options,
                        NormalizationBounds* bounds_out = nullptr);

/// Applies/repeats normalization with known bounds.
void normalize_columns(FeatureMatrix& matrix, const NormalizationBounds& bounds);
NormalizationBounds compute_bounds(const FeatureMatrix& matrix);

// CSV + JSON sidecar persistence. Floats carry 9 significant digits.
void save_feature_csv(const FeatureMatrix& matrix, const std::filesystem::path& file);
FeatureMatrix load_feature_csv(const std::filesystem::path& file);
void save_bounds_json(const NormalizationBounds& bounds,
                      const std::vector<std::string>& columns,
                      std::uint64_t config_hash, const std::filesystem::path& file);
std::optional<std::uint64_t> read_bounds_config_hash(const std::filesystem::path& file);

}  // namespace tlr
