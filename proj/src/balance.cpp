#include "tlr/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "tlr/common.hpp"

namespace tlr {

std::string rebalance_method_name(RebalanceMethod method) {
    switch (method) {
        case RebalanceMethod::none: return "none";
        case RebalanceMethod::smote: return "smote";
        case RebalanceMethod::undersampling: return "undersampling";
        case RebalanceMethod::fifty_fifty: return "5050";
    }
    throw InternalError("unhandled RebalanceMethod");
}

RebalanceMethod parse_rebalance_method(const std::string& name) {
    static const std::map<std::string, RebalanceMethod> lookup{
        {"none", RebalanceMethod::none},
        {"smote", RebalanceMethod::smote},
        {"undersampling", RebalanceMethod::undersampling},
        {"5050", RebalanceMethod::fifty_fifty},
        {"fifty_fifty", RebalanceMethod::fifty_fifty}};
    const auto it = lookup.find(name);
    if (it == lookup.end()) throw ConfigError("unknown rebalance method: '" + name + "'");
    return it->second;
}

namespace {

struct ClassSplit {
    std::vector<std::size_t> minority;
    std::vector<std::size_t> majority;
    std::uint8_t minority_label;
};

ClassSplit split_classes(const Table& table) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        (table.labels[r] ? pos : neg).push_back(r);
    }
    if (pos.size() <= neg.size()) return {std::move(pos), std::move(neg), 1};
    return {std::move(neg), std::move(pos), 0};
}

}  // namespace

std::size_t count_minority(const Table& table) {
    const auto split = split_classes(table);
    return split.minority.size();
}

Table smote(const Table& table, std::size_t target_minority_count, int k,
            std::uint64_t seed) {
    const auto split = split_classes(table);
    const std::size_t m = split.minority.size();
    if (m < 2) throw DataError("SMOTE requires at least two minority rows");
    if (k < 1) throw ConfigError("smote_k must be at least 1");
    if (static_cast<std::size_t>(k) >= m) k = static_cast<int>(m) - 1;

    // k nearest minority neighbours per minority row (Euclidean, ties by row order)
    std::vector<std::vector<std::size_t>> neighbours(m);
    std::vector<std::pair<double, std::size_t>> dist(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* a = table.row(split.minority[i]);
        for (std::size_t j = 0; j < m; ++j) {
            double d2 = 0.0;
            const double* b = table.row(split.minority[j]);
            for (std::size_t c = 0; c < table.cols; ++c) {
                const double diff = a[c] - b[c];
                d2 += diff * diff;
            }
            dist[j] = {i == j ? std::numeric_limits<double>::infinity() : d2, j};
        }
        std::stable_sort(dist.begin(), dist.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        for (int nn = 0; nn < k; ++nn) neighbours[i].push_back(dist[nn].second);
    }

    Table out = table;
    if (target_minority_count <= m) return out;
    const std::size_t synth_count = target_minority_count - m;

    Rng rng(seed);
    std::vector<double> synthetic(table.cols);
    for (std::size_t s = 0; s < synth_count; ++s) {
        const std::size_t i = s % m;  // even boost via round-robin over minority rows
        const std::size_t nn = neighbours[i][rng.index(neighbours[i].size())];
        const double u = rng.uniform();
        const double* a = table.row(split.minority[i]);
        const double* b = table.row(split.minority[nn]);
        for (std::size_t c = 0; c < table.cols; ++c) {
            synthetic[c] = a[c] + u * (b[c] - a[c]);
        }
        out.push_row(synthetic.data(), split.minority_label);
    }
    return out;
}

Table undersample(const Table& table, std::uint64_t seed) {
    const auto split = split_classes(table);
    if (split.majority.size() <= split.minority.size()) return table;

    std::vector<std::size_t> keep = split.majority;
    Rng rng(seed);
    rng.shuffle(keep);
    keep.resize(split.minority.size());

    std::vector<bool> selected(table.rows(), false);
    for (const std::size_t r : split.minority) selected[r] = true;
    for (const std::size_t r : keep) selected[r] = true;

    Table out;
    out.cols = table.cols;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        if (selected[r]) out.push_row(table.row(r), table.labels[r]);
    }
    return out;
}

Table fifty_fifty(const Table& table, int k, std::uint64_t seed) {
    const auto split = split_classes(table);
    const std::size_t m = split.minority.size();
    const std::size_t maj = split.majority.size();
    if (maj <= m) return table;
    const std::size_t boost = (maj - m + 1) / 2;  // ceiling of half the full boost
    Table boosted = smote(table, m + boost, k, seed);
    return undersample(boosted, derive_seed(seed, 1));
}

Table rebalance(const Table& table, const RebalanceConfig& config) {
    switch (config.method) {
        case RebalanceMethod::none:
            return table;
        case RebalanceMethod::smote: {
            const auto split = split_classes(table);
            return smote(table, split.majority.size(), config.smote_k, config.rng_seed);
        }
        case RebalanceMethod::undersampling:
            return undersample(table, config.rng_seed);
        case RebalanceMethod::fifty_fifty:
            return fifty_fifty(table, config.smote_k, config.rng_seed);
    }
    throw InternalError("unhandled RebalanceMethod");
}

}  // namespace tlr
