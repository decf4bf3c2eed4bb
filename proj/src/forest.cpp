#include <algorithm>
#include <cmath>
#include <numeric>

#include "tlr/common.hpp"
#include "tlr/learn.hpp"
#include "tlr/threadpool.hpp"

namespace tlr {

using nlohmann::json;

namespace {

// Feature values are quantile-binned once per training set (up to 256 bins);
// split search then scans bin histograms instead of sorting node rows. Stored
// cuts are real feature values, so prediction needs no bin structures.
constexpr int kMaxBins = 256;

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double cut = 0.0;       // go left when value <= cut
    int left = 0, right = 0;
    std::uint8_t vote = 0;  // leaf majority (valid on ties)
};

struct Tree {
    std::vector<TreeNode> nodes;

    std::uint8_t predict(std::span<const double> row) const {
        int at = 0;
        while (nodes[at].feature >= 0) {
            at = row[nodes[at].feature] <= nodes[at].cut ? nodes[at].left
                                                         : nodes[at].right;
        }
        return nodes[at].vote;
    }
};

struct BinnedData {
    std::size_t cols = 0;
    std::vector<std::uint8_t> codes;              // row-major bin codes
    std::vector<std::vector<double>> bin_uppers;  // per feature, largest value per bin
    std::vector<std::vector<double>> bin_mins;    // per feature, smallest value per bin

    // split between bins b and b+1 lands midway between the adjacent
    // observed values, the classic CART threshold placement
    double cut_between(std::size_t feature, int b) const {
        return 0.5 * (bin_uppers[feature][b] + bin_mins[feature][b + 1]);
    }
};

BinnedData bin_features(const Table& table) {
    BinnedData binned;
    binned.cols = table.cols;
    binned.codes.assign(table.rows() * table.cols, 0);
    binned.bin_uppers.resize(table.cols);
    binned.bin_mins.resize(table.cols);

    std::vector<double> values(table.rows());
    for (std::size_t c = 0; c < table.cols; ++c) {
        for (std::size_t r = 0; r < table.rows(); ++r) values[r] = table.row(r)[c];
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

        auto& uppers = binned.bin_uppers[c];
        auto& mins = binned.bin_mins[c];
        if (sorted.size() <= kMaxBins) {
            uppers = sorted;
            mins = sorted;
        } else {
            uppers.reserve(kMaxBins);
            for (int b = 1; b <= kMaxBins; ++b) {
                const std::size_t at =
                    std::min(sorted.size() - 1,
                             sorted.size() * static_cast<std::size_t>(b) / kMaxBins - 1);
                if (uppers.empty() || sorted[at] > uppers.back()) {
                    uppers.push_back(sorted[at]);
                }
            }
            mins.reserve(uppers.size());
            mins.push_back(sorted.front());
            for (std::size_t b = 1; b < uppers.size(); ++b) {
                mins.push_back(*std::upper_bound(sorted.begin(), sorted.end(),
                                                 uppers[b - 1]));
            }
        }
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const auto it = std::lower_bound(uppers.begin(), uppers.end(), values[r]);
            binned.codes[r * table.cols + c] = static_cast<std::uint8_t>(
                std::min<std::size_t>(it - uppers.begin(), uppers.size() - 1));
        }
    }
    return binned;
}

struct SplitResult {
    int feature = -1;
    int bin = -1;
    double impurity = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const BinnedData& binned, const std::vector<std::uint8_t>& labels,
                int mtry, Rng rng)
        : binned_(binned), labels_(labels), mtry_(mtry), rng_(rng),
          feature_pool_(binned.cols) {
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
    }

    Tree build(std::vector<std::uint32_t> samples) {
        Tree tree;
        tree.nodes.emplace_back();
        grow(tree, 0, std::move(samples));
        return tree;
    }

private:
    void grow(Tree& tree, int node, std::vector<std::uint32_t> samples) {
        std::size_t positives = 0;
        for (const auto r : samples) positives += labels_[r];
        TreeNode& n = tree.nodes[node];
        if (positives == 0 || positives == samples.size() || samples.size() < 2) {
            n.vote = positives * 2 >= samples.size() ? 1 : 0;
            return;
        }

        const SplitResult split = best_split(samples, positives);
        if (split.feature < 0) {
            n.vote = positives * 2 >= samples.size() ? 1 : 0;
            return;
        }

        std::vector<std::uint32_t> left, right;
        left.reserve(samples.size());
        right.reserve(samples.size());
        for (const auto r : samples) {
            const int code = binned_.codes[r * binned_.cols + split.feature];
            (code <= split.bin ? left : right).push_back(r);
        }
        samples.clear();
        samples.shrink_to_fit();

        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const int right_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[node];  // re-take: vector may have grown
        parent.feature = split.feature;
        parent.cut = binned_.cut_between(split.feature, split.bin);
        parent.left = left_id;
        parent.right = right_id;
        grow(tree, left_id, std::move(left));
        grow(tree, right_id, std::move(right));
    }

    SplitResult best_split(const std::vector<std::uint32_t>& samples,
                           std::size_t positives) {
        // shuffle the feature pool; the first mtry entries are the candidate
        // draw, and the scan keeps consuming further entries when none of the
        // candidates produced a valid split
        for (std::size_t i = 0; i + 1 < feature_pool_.size(); ++i) {
            const std::size_t j = i + rng_.index(feature_pool_.size() - i);
            std::swap(feature_pool_[i], feature_pool_[j]);
        }

        SplitResult best;
        const double n_total = static_cast<double>(samples.size());
        const double parent_gini =
            gini(static_cast<double>(positives), n_total - positives);
        best.impurity = parent_gini;

        for (std::size_t i = 0; i < feature_pool_.size(); ++i) {
            if (static_cast<int>(i) >= mtry_ && best.feature >= 0) break;
            const int feature = feature_pool_[i];
            const int bins = static_cast<int>(binned_.bin_uppers[feature].size());
            count_.assign(bins, 0);
            pos_.assign(bins, 0);
            for (const auto r : samples) {
                const int code = binned_.codes[r * binned_.cols + feature];
                ++count_[code];
                pos_[code] += labels_[r];
            }
            double left_n = 0.0, left_pos = 0.0;
            for (int b = 0; b + 1 < bins; ++b) {
                left_n += count_[b];
                left_pos += pos_[b];
                if (left_n == 0.0 || left_n == n_total) continue;
                const double right_n = n_total - left_n;
                const double right_pos = static_cast<double>(positives) - left_pos;
                const double weighted =
                    (left_n * gini(left_pos, left_n - left_pos) +
                     right_n * gini(right_pos, right_n - right_pos)) /
                    n_total;
                if (weighted < best.impurity - 1e-12) {
                    best = {feature, b, weighted};
                }
            }
        }
        return best;
    }

    static double gini(double pos, double neg) {
        const double n = pos + neg;
        if (n <= 0.0) return 0.0;
        const double p = pos / n;
        return 2.0 * p * (1.0 - p);
    }

    const BinnedData& binned_;
    const std::vector<std::uint8_t>& labels_;
    int mtry_;
    Rng rng_;
    std::vector<int> feature_pool_;
    std::vector<std::uint32_t> count_, pos_;
};

class ForestModel final : public TrainedModel {
public:
    ForestModel(std::vector<Tree> trees, std::uint64_t seed) : trees_(std::move(trees)) {
        seed_ = seed;
    }

    explicit ForestModel(const json& p) {
        for (const auto& jt : p.at("trees")) {
            Tree tree;
            for (const auto& jn : jt) {
                TreeNode n;
                n.feature = jn.at(0).get<int>();
                if (n.feature >= 0) {
                    n.cut = jn.at(1).get<double>();
                    n.left = jn.at(2).get<int>();
                    n.right = jn.at(3).get<int>();
                } else {
                    n.vote = jn.at(1).get<int>() != 0 ? 1 : 0;
                }
                tree.nodes.push_back(n);
            }
            trees_.push_back(std::move(tree));
        }
    }

    Algorithm algorithm() const override { return Algorithm::random_forest; }

    Prediction predict(std::span<const double> row) const override {
        int valid = 0;
        for (const auto& tree : trees_) valid += tree.predict(row);
        const double p = static_cast<double>(valid) / static_cast<double>(trees_.size());
        return {p >= 0.5, p};
    }

    json params_json() const override {
        json trees = json::array();
        for (const auto& tree : trees_) {
            json jt = json::array();
            for (const auto& n : tree.nodes) {
                if (n.feature >= 0) {
                    jt.push_back({n.feature, n.cut, n.left, n.right});
                } else {
                    jt.push_back({-1, static_cast<int>(n.vote)});
                }
            }
            trees.push_back(std::move(jt));
        }
        return {{"trees", trees}};
    }

private:
    std::vector<Tree> trees_;
};

}  // namespace

std::unique_ptr<TrainedModel> train_random_forest(const Table& table,
                                                  const Hyperparams& params,
                                                  std::uint64_t seed) {
    if (table.rows() == 0) throw DataError("random forest requires training rows");
    const BinnedData binned = bin_features(table);
    const int mtry = std::max(1, static_cast<int>(std::sqrt(
                                     static_cast<double>(table.cols))));
    const std::size_t n = table.rows();

    std::vector<Tree> trees(params.rf_trees);
    ThreadPool pool(params.jobs);
    pool.parallel_for(trees.size(), [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::uint32_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) {
            bootstrap[i] = static_cast<std::uint32_t>(rng.index(n));
        }
        TreeBuilder builder(binned, table.labels, mtry, Rng(derive_seed(seed, t + 1000003)));
        trees[t] = builder.build(std::move(bootstrap));
    });
    return std::make_unique<ForestModel>(std::move(trees), seed);
}

std::unique_ptr<TrainedModel> random_forest_from_json(const json& params) {
    return std::make_unique<ForestModel>(params);
}

}  // namespace tlr
