#include "tlr/selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include <json.hpp>

#include "tlr/common.hpp"

namespace tlr {

using nlohmann::json;

std::string selection_method_name(SelectionMethod method) {
    switch (method) {
        case SelectionMethod::none: return "none";
        case SelectionMethod::cfs: return "cfs";
        case SelectionMethod::correlation: return "correlation";
        case SelectionMethod::gain_ratio: return "gainRatio";
        case SelectionMethod::info_gain: return "infoGain";
        case SelectionMethod::symmetrical: return "symmetrical";
    }
    throw InternalError("unhandled SelectionMethod");
}

SelectionMethod parse_selection_method(const std::string& name) {
    static const std::map<std::string, SelectionMethod> lookup{
        {"none", SelectionMethod::none},
        {"cfs", SelectionMethod::cfs},
        {"correlation", SelectionMethod::correlation},
        {"gainRatio", SelectionMethod::gain_ratio},
        {"gain_ratio", SelectionMethod::gain_ratio},
        {"infoGain", SelectionMethod::info_gain},
        {"info_gain", SelectionMethod::info_gain},
        {"symmetrical", SelectionMethod::symmetrical}};
    const auto it = lookup.find(name);
    if (it == lookup.end()) throw ConfigError("unknown selection method: '" + name + "'");
    return it->second;
}

std::vector<int> discretize(const std::vector<double>& values, int bins) {
    const std::size_t n = values.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<int> result(n, 0);
    std::size_t pos = 0;
    while (pos < n) {
        // a run of equal values lands entirely in the bin where it starts
        std::size_t end = pos;
        while (end < n && values[order[end]] == values[order[pos]]) ++end;
        const int bin = std::min<int>(bins - 1,
                                      static_cast<int>(pos * static_cast<std::size_t>(bins) / n));
        for (std::size_t i = pos; i < end; ++i) result[order[i]] = bin;
        pos = end;
    }
    return result;
}

namespace {

double entropy_bits(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (const std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

struct EntropyScores {
    double info_gain;
    double h_x;
    double h_y;
};

EntropyScores entropy_scores(const std::vector<int>& binned,
                             const std::vector<std::uint8_t>& labels) {
    const std::size_t n = binned.size();
    const int num_bins = n == 0 ? 0 : *std::max_element(binned.begin(), binned.end()) + 1;
    std::vector<std::size_t> x_counts(num_bins, 0);
    std::vector<std::size_t> y_counts(2, 0);
    std::vector<std::array<std::size_t, 2>> joint(num_bins, {0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        ++x_counts[binned[i]];
        ++y_counts[labels[i] ? 1 : 0];
        ++joint[binned[i]][labels[i] ? 1 : 0];
    }
    const double h_y = entropy_bits(y_counts, n);
    const double h_x = entropy_bits(x_counts, n);
    double h_y_given_x = 0.0;
    for (int b = 0; b < num_bins; ++b) {
        if (x_counts[b] == 0) continue;
        const double p_x = static_cast<double>(x_counts[b]) / static_cast<double>(n);
        h_y_given_x +=
            p_x * entropy_bits({joint[b][0], joint[b][1]}, x_counts[b]);
    }
    return {h_y - h_y_given_x, h_x, h_y};
}

double abs_pearson_with_labels(const std::vector<double>& column,
                               const std::vector<std::uint8_t>& labels) {
    const std::size_t n = column.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += column[i];
        my += labels[i] ? 1.0 : 0.0;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = column[i] - mx;
        const double dy = (labels[i] ? 1.0 : 0.0) - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return std::fabs(sxy / std::sqrt(sxx * syy));
}

}  // namespace

double feature_score(SelectionMethod method, const std::vector<double>& column,
                     const std::vector<std::uint8_t>& labels) {
    switch (method) {
        case SelectionMethod::correlation:
            return abs_pearson_with_labels(column, labels);
        case SelectionMethod::info_gain:
        case SelectionMethod::gain_ratio:
        case SelectionMethod::symmetrical: {
            const auto s = entropy_scores(discretize(column), labels);
            if (method == SelectionMethod::info_gain) return s.info_gain;
            if (method == SelectionMethod::gain_ratio) {
                return s.h_x > 0.0 ? s.info_gain / s.h_x : 0.0;
            }
            const double denom = s.h_x + s.h_y;
            return denom > 0.0 ? 2.0 * s.info_gain / denom : 0.0;
        }
        default:
            throw ConfigError("feature_score requires a ranker method");
    }
}

double cfs_merit(const std::vector<double>& class_corr,
                 const std::vector<std::vector<double>>& feature_corr,
                 const std::vector<int>& subset) {
    const std::size_t k = subset.size();
    if (k == 0) return 0.0;
    double rcf = 0.0;
    for (const int f : subset) rcf += class_corr[f];
    rcf /= static_cast<double>(k);
    double rff = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            rff += feature_corr[subset[i]][subset[j]];
        }
    }
    const double pairs = static_cast<double>(k) * (k - 1) / 2.0;
    if (pairs > 0.0) rff /= pairs;
    const double denom = std::sqrt(static_cast<double>(k) +
                                   static_cast<double>(k) * (k - 1) * rff);
    return denom > 0.0 ? static_cast<double>(k) * rcf / denom : 0.0;
}

namespace {

double symmetrical_uncertainty(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    const int bins_a = n == 0 ? 0 : *std::max_element(a.begin(), a.end()) + 1;
    const int bins_b = n == 0 ? 0 : *std::max_element(b.begin(), b.end()) + 1;
    std::vector<std::size_t> ca(bins_a, 0), cb(bins_b, 0);
    std::map<std::pair<int, int>, std::size_t> joint;
    for (std::size_t i = 0; i < n; ++i) {
        ++ca[a[i]];
        ++cb[b[i]];
        ++joint[{a[i], b[i]}];
    }
    const double h_a = entropy_bits(ca, n);
    const double h_b = entropy_bits(cb, n);
    double h_ab = 0.0;
    for (const auto& [key, count] : joint) {
        const double p = static_cast<double>(count) / static_cast<double>(n);
        h_ab -= p * std::log2(p);
    }
    const double mi = h_a + h_b - h_ab;
    const double denom = h_a + h_b;
    return denom > 0.0 ? 2.0 * mi / denom : 0.0;
}

}  // namespace

std::vector<int> cfs_subset(const FeatureMatrix& matrix) {
    const int p = static_cast<int>(matrix.cols());
    const std::size_t n = matrix.rows();

    std::vector<std::vector<int>> binned(p);
    std::vector<double> column(n);
    for (int c = 0; c < p; ++c) {
        for (std::size_t r = 0; r < n; ++r) column[r] = matrix.at(r, c);
        binned[c] = discretize(column);
    }
    std::vector<int> label_bins(n);
    for (std::size_t r = 0; r < n; ++r) label_bins[r] = matrix.labels[r] ? 1 : 0;

    std::vector<double> class_corr(p);
    for (int c = 0; c < p; ++c) class_corr[c] = symmetrical_uncertainty(binned[c], label_bins);
    std::vector<std::vector<double>> feature_corr(p, std::vector<double>(p, 1.0));
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            feature_corr[i][j] = feature_corr[j][i] =
                symmetrical_uncertainty(binned[i], binned[j]);
        }
    }

    // best-first forward search, stop after 5 consecutive non-improving expansions
    std::vector<int> best_subset;
    double best_merit = 0.0;
    std::set<std::vector<int>> visited;
    using Node = std::pair<double, std::vector<int>>;
    std::priority_queue<Node> open;
    open.push({0.0, {}});
    visited.insert({});
    int stale = 0;
    while (!open.empty() && stale < 5) {
        const auto [merit, subset] = open.top();
        open.pop();
        bool improved = false;
        for (int c = 0; c < p; ++c) {
            if (std::find(subset.begin(), subset.end(), c) != subset.end()) continue;
            std::vector<int> candidate = subset;
            candidate.push_back(c);
            std::sort(candidate.begin(), candidate.end());
            if (!visited.insert(candidate).second) continue;
            const double m = cfs_merit(class_corr, feature_corr, candidate);
            if (m > best_merit) {
                best_merit = m;
                best_subset = candidate;
                improved = true;
            }
            open.push({m, std::move(candidate)});
        }
        stale = improved ? 0 : stale + 1;
    }
    return best_subset;
}

SelectionResult select(const FeatureMatrix& matrix, SelectionMethod method,
                       double threshold) {
    SelectionResult result;
    result.method = method;
    result.threshold = threshold;
    const int p = static_cast<int>(matrix.cols());

    if (method == SelectionMethod::none) {
        result.kept_indices.resize(p);
        std::iota(result.kept_indices.begin(), result.kept_indices.end(), 0);
    } else if (method == SelectionMethod::cfs) {
        result.kept_indices = cfs_subset(matrix);
    } else {
        result.scores.resize(p);
        std::vector<double> column(matrix.rows());
        for (int c = 0; c < p; ++c) {
            for (std::size_t r = 0; r < matrix.rows(); ++r) column[r] = matrix.at(r, c);
            result.scores[c] = feature_score(method, column, matrix.labels);
        }
        std::vector<int> order(p);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return result.scores[a] > result.scores[b];
        });
        for (const int c : order) {
            if (result.scores[c] > threshold) result.kept_indices.push_back(c);
        }
    }
    for (const int c : result.kept_indices) result.kept_columns.push_back(matrix.columns[c]);
    return result;
}

FeatureMatrix project(const FeatureMatrix& matrix, const std::vector<int>& kept_indices) {
    FeatureMatrix out;
    out.source_ids = matrix.source_ids;
    out.target_ids = matrix.target_ids;
    out.labels = matrix.labels;
    out.columns.reserve(kept_indices.size());
    for (const int c : kept_indices) out.columns.push_back(matrix.columns[c]);
    out.values.reserve(matrix.rows() * kept_indices.size());
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        for (const int c : kept_indices) out.values.push_back(matrix.at(r, c));
    }
    return out;
}

void save_selection_json(const SelectionResult& result,
                         const std::vector<std::string>& all_columns,
                         const std::filesystem::path& file) {
    json j;
    j["method"] = selection_method_name(result.method);
    j["threshold"] = result.threshold;
    j["kept_columns"] = result.kept_columns;
    if (!result.scores.empty()) {
        json scores = json::object();
        for (std::size_t c = 0; c < all_columns.size(); ++c) {
            scores[all_columns[c]] = result.scores[c];
        }
        j["scores"] = scores;
    }
    std::ofstream out(file);
    if (!out) throw DataError("cannot write selection result: " + file.string());
    out << j.dump(2) << '\n';
}

}  // namespace tlr
