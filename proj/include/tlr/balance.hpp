#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tlr {

enum class RebalanceMethod { none, smote, undersampling, fifty_fifty };

std::string rebalance_method_name(RebalanceMethod method);
RebalanceMethod parse_rebalance_method(const std::string& name);

/// Rows-with-labels view used by the rebalancers and classifiers; detached
/// from the feature matrix so synthetic rows carry no artifact ids.
struct Table {
    std::size_t cols = 0;
    std::vector<double> values;  // row-major
    std::vector<std::uint8_t> labels;

    std::size_t rows() const { return labels.size(); }
    const double* row(std::size_t r) const { return &values[r * cols]; }
    void push_row(const double* v, std::uint8_t label) {
        values.insert(values.end(), v, v + cols);
        labels.push_back(label);
    }
};

struct RebalanceConfig {
    RebalanceMethod method = RebalanceMethod::smote;
    int smote_k = 5;
    std::uint64_t rng_seed = 0;
};

/// Oversamples the minority class to `target_minority_count` by interpolating
/// between a minority row and one of its k nearest minority neighbours
/// (Euclidean); originals are always retained. Errors when the minority class
/// has fewer than two rows.
Table smote(const Table& table, std::size_t target_minority_count, int k,
            std::uint64_t seed);

/// Uniform sample without replacement of the majority class down to the
/// minority count.
Table undersample(const Table& table, std::uint64_t seed);

/// Half the full-SMOTE boost (ceiling), then majority undersampling down to
/// the new minority count; classes end exactly equal.
Table fifty_fifty(const Table& table, int k, std::uint64_t seed);

Table rebalance(const Table& table, const RebalanceConfig& config);

std::size_t count_minority(const Table& table);  // count of the rarer label

}  // namespace tlr
