#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tlr/features.hpp"

namespace tlr {

enum class SelectionMethod { none, cfs, correlation, gain_ratio, info_gain, symmetrical };

std::string selection_method_name(SelectionMethod method);
SelectionMethod parse_selection_method(const std::string& name);

struct SelectionResult {
    SelectionMethod method = SelectionMethod::none;
    double threshold = 0.0;
    std::vector<double> scores;             // per input column; empty for none/cfs
    std::vector<std::string> kept_columns;  // ordered
    std::vector<int> kept_indices;          // into the input matrix's columns
};

/// Equal-frequency binning into at most `bins` bins; tied values share the
/// bin where the run of ties starts.
std::vector<int> discretize(const std::vector<double>& values, int bins = 10);

/// Single-feature relevance. Entropy-based scores use the discretized column
/// and log base 2; correlation is |Pearson r| against the 0/1 labels.
double feature_score(SelectionMethod method, const std::vector<double>& column,
                     const std::vector<std::uint8_t>& labels);

/// Correlation-based subset search (symmetrical uncertainty as the correlation
/// measure): best-first forward search over the merit
///   k * mean(r_cf) / sqrt(k + k (k-1) mean(r_ff)),
/// stopping after 5 consecutive non-improving expansions.
std::vector<int> cfs_subset(const FeatureMatrix& matrix);

/// Merit of an explicit subset; exposed for the exhaustive-search oracle.
double cfs_merit(const std::vector<double>& class_corr,
                 const std::vector<std::vector<double>>& feature_corr,
                 const std::vector<int>& subset);

/// Ranker methods keep every column scoring above `threshold`, ordered by
/// descending score; cfs returns its searched subset; none keeps everything.
SelectionResult select(const FeatureMatrix& matrix, SelectionMethod method,
                       double threshold = 1e-6);

FeatureMatrix project(const FeatureMatrix& matrix, const std::vector<int>& kept_indices);

void save_selection_json(const SelectionResult& result,
                         const std::vector<std::string>& all_columns,
                         const std::filesystem::path& file);

}  // namespace tlr
