#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlr/eval.hpp"
#include "tlr/features.hpp"

namespace tlr {

/// Inputs that determine the cached artifacts: retrieval configuration,
/// feature options and the dataset content fingerprint.
std::string featurize_config_text(const ModelConfig& model, const FeatureOptions& options,
                                  Language language, std::uint64_t content_hash);

/// Feature matrix plus the pooled per-model pair scores used by the IR
/// baselines (order: all seven models, pairs in (source, target) link order,
/// LM scores already normalized for cross-query pooling).
struct DatasetArtifacts {
    FeatureMatrix features;
    NormalizationBounds bounds;
    std::vector<std::vector<double>> pooled_scores;  // [model][pair]
    bool from_cache = false;
};

/// Builds (or loads, when the config hash matches) the per-dataset artifacts.
/// The cache directory holds features.csv, features_minmax.json and
/// pair_scores.bin keyed by the config hash.
DatasetArtifacts load_or_build_artifacts(const TraceDataset& dataset,
                                         const ModelConfig& model,
                                         const FeatureOptions& options,
                                         const std::filesystem::path& cache_dir);

}  // namespace tlr
