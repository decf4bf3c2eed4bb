#include "tlr/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tlr/common.hpp"

namespace tlr {

using nlohmann::json;

namespace {

constexpr const char* kDirNames[2] = {"fwd", "rev"};

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double max_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double sum_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double stdev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = mean_of(x), my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

const std::array<std::string, FeatureSchema::kPreMetricCount>&
FeatureSchema::pre_metric_names() {
    static const std::array<std::string, kPreMetricCount> names{
        "idf_avg",     "idf_max",     "idf_dev",  "ictf_avg", "ictf_max", "ictf_dev",
        "entropy_avg", "entropy_max", "entropy_dev", "var_avg", "var_max", "var_sum",
        "scq_avg",     "scq_max",     "scq_sum",  "scs",      "qs",       "pmi_avg",
        "pmi_max",     "coherence",   "ql"};
    return names;
}

const std::array<std::string, FeatureSchema::kPostMetricCount>&
FeatureSchema::post_metric_names() {
    static const std::array<std::string, kPostMetricCount> names{
        "subquery_overlap", "robustness",  "first_rank_change", "clustering",
        "spatial_autocorr", "wig",         "nqc"};
    return names;
}

const std::vector<std::string>& FeatureSchema::column_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> cols;
        cols.reserve(kTotal);
        for (const IrModel model : kAllIrModels) {
            for (const char* dir : kDirNames) {
                cols.push_back("ir." + ir_model_name(model) + "." + dir);
            }
        }
        for (const auto& metric : pre_metric_names()) {
            for (const char* dir : kDirNames) {
                cols.push_back("qq.pre." + metric + "." + dir);
            }
        }
        for (const auto& metric : post_metric_names()) {
            for (const IrModel model : kPostQqModels) {
                for (const char* dir : kDirNames) {
                    cols.push_back("qq.post." + metric + "." + ir_model_name(model) +
                                   "." + dir);
                }
            }
        }
        cols.push_back("doc.src_unique_terms");
        cols.push_back("doc.tgt_unique_terms");
        cols.push_back("doc.src_total_terms");
        cols.push_back("doc.tgt_total_terms");
        cols.push_back("doc.overlap");
        if (static_cast<int>(cols.size()) != kTotal) {
            throw InternalError("feature schema size mismatch");
        }
        return cols;
    }();
    return names;
}

std::array<double, FeatureSchema::kPreMetricCount> pre_retrieval_qq(
    const CorpusModels& models, Side corpus_side, const Artifact& query) {
    std::array<double, FeatureSchema::kPreMetricCount> out{};
    const TermIndex& index = models.index(corpus_side);
    const IndexedQuery q = make_query(index, query.tokens);
    out[20] = static_cast<double>(q.total_tokens);  // ql is defined even off-index
    if (q.terms.empty() || index.num_docs == 0 || index.total_tokens == 0) return out;

    const auto& stats = models.term_stats(corpus_side);
    std::vector<double> idf, ictf, entropy, variance, scq;
    std::set<int> covered_docs;
    double scs = 0.0;
    for (const auto& qt : q.terms) {
        const int t = qt.term;
        idf.push_back(index.idf(t));
        ictf.push_back(std::log(static_cast<double>(index.total_tokens) /
                                static_cast<double>(index.collection_freq[t])));
        entropy.push_back(stats.entropy[t]);
        variance.push_back(stats.variance[t]);
        scq.push_back((1.0 + std::log(static_cast<double>(index.collection_freq[t]))) *
                      index.idf(t));
        for (const auto& dc : index.postings[t]) covered_docs.insert(dc.doc);

        const double p_q = static_cast<double>(qt.count) / q.total_tokens;
        const double p_c = index.collection_prob(t);
        scs += p_q * std::log2(p_q / p_c);
    }

    out[0] = mean_of(idf);
    out[1] = max_of(idf);
    out[2] = stdev_of(idf);
    out[3] = mean_of(ictf);
    out[4] = max_of(ictf);
    out[5] = stdev_of(ictf);
    out[6] = mean_of(entropy);
    out[7] = max_of(entropy);
    out[8] = stdev_of(entropy);
    out[9] = mean_of(variance);
    out[10] = max_of(variance);
    out[11] = sum_of(variance);
    out[12] = mean_of(scq);
    out[13] = max_of(scq);
    out[14] = sum_of(scq);
    out[15] = scs;
    out[16] = -std::log(static_cast<double>(covered_docs.size()) / index.num_docs);

    // PMI over co-occurring query-term pairs (document-level co-occurrence)
    std::vector<double> pmi;
    for (std::size_t i = 0; i < q.terms.size(); ++i) {
        for (std::size_t j = i + 1; j < q.terms.size(); ++j) {
            const auto& pa = index.postings[q.terms[i].term];
            const auto& pb = index.postings[q.terms[j].term];
            std::size_t x = 0, y = 0, both = 0;
            while (x < pa.size() && y < pb.size()) {
                if (pa[x].doc < pb[y].doc) ++x;
                else if (pb[y].doc < pa[x].doc) ++y;
                else { ++both; ++x; ++y; }
            }
            if (both > 0) {
                pmi.push_back(std::log(static_cast<double>(both) * index.num_docs /
                                       (static_cast<double>(index.doc_freq[q.terms[i].term]) *
                                        index.doc_freq[q.terms[j].term])));
            }
        }
    }
    out[17] = mean_of(pmi);
    out[18] = max_of(pmi);

    double coherence = 0.0;
    for (const auto& qt : q.terms) coherence += stats.coherence[qt.term];
    out[19] = coherence / static_cast<double>(q.terms.size());
    return out;
}

namespace {

double score_one(const CorpusModels& models, IrModel model, const TermIndex& index,
                 const IndexedQuery& q, DocView doc) {
    switch (model) {
        case IrModel::vsm: return vsm_score(index, q, doc);
        case IrModel::js: return js_score(q, doc);
        case IrModel::bm25: return bm25_score(index, q, doc, models.config());
        case IrModel::lm_dirichlet:
            return lm_score(index, q, doc, LmKind::dirichlet, models.config());
        case IrModel::lm_jm:
            return lm_score(index, q, doc, LmKind::jelinek_mercer, models.config());
        default:
            throw InternalError("post-retrieval metrics exclude LSA and LDA");
    }
}

std::vector<double> score_docs(const CorpusModels& models, IrModel model,
                               const TermIndex& index, const IndexedQuery& q) {
    std::vector<double> scores(index.num_docs);
    for (int d = 0; d < index.num_docs; ++d) {
        scores[d] = score_one(models, model, index, q, doc_view(index, d));
    }
    return scores;
}

IndexedQuery drop_term(const IndexedQuery& q, std::size_t position) {
    IndexedQuery sub;
    sub.novel_counts = q.novel_counts;
    sub.total_tokens = q.total_tokens - q.terms[position].count;
    sub.terms.reserve(q.terms.size() - 1);
    for (std::size_t i = 0; i < q.terms.size(); ++i) {
        if (i != position) sub.terms.push_back(q.terms[i]);
    }
    return sub;
}

}  // namespace

std::array<double, FeatureSchema::kPostMetricCount> post_retrieval_qq(
    const CorpusModels& models, Side corpus_side, const Artifact& query,
    int query_position, IrModel model, const FeatureOptions& options,
    std::uint64_t perturb_seed) {
    (void)query_position;
    std::array<double, FeatureSchema::kPostMetricCount> out{};
    const TermIndex& index = models.index(corpus_side);
    const IndexedQuery q = make_query(index, query.tokens);
    if (q.terms.empty() || index.num_docs == 0) return out;

    const std::vector<double> scores = score_docs(models, model, index, q);
    const std::vector<RankedDoc> ranked = rank_scores(scores);
    const int eta = std::min(options.result_depth, index.num_docs);

    std::vector<int> top_docs(eta);
    std::vector<double> top_scores(eta);
    for (int i = 0; i < eta; ++i) {
        top_docs[i] = ranked[i].doc;
        top_scores[i] = ranked[i].score;
    }
    std::vector<bool> in_top(index.num_docs, false);
    for (const int d : top_docs) in_top[d] = true;

    // (1) subquery overlap and (3) first rank change
    const std::size_t num_terms = q.terms.size();
    if (num_terms <= 1) {
        out[0] = 1.0;  // single-term query: the only subquery is the query itself
        out[2] = 0.0;
    } else {
        double overlap_sum = 0.0;
        int rank1_changes = 0;
        for (std::size_t t = 0; t < num_terms; ++t) {
            const IndexedQuery sub = drop_term(q, t);
            const auto sub_ranked = rank_scores(score_docs(models, model, index, sub));
            int shared = 0;
            for (int i = 0; i < eta; ++i) {
                if (in_top[sub_ranked[i].doc]) ++shared;
            }
            overlap_sum += static_cast<double>(shared) / eta;
            if (sub_ranked[0].doc != ranked[0].doc) ++rank1_changes;
        }
        out[0] = overlap_sum / static_cast<double>(num_terms);
        out[2] = static_cast<double>(rank1_changes) / static_cast<double>(num_terms);
    }

    // (2) robustness: perturb each top document, re-rank, mean Spearman
    if (eta >= 2) {
        Rng rng(perturb_seed);
        double rho_sum = 0.0;
        std::vector<int> flat;
        std::vector<TermCount> perturbed;
        for (int rep = 0; rep < options.robustness_repetitions; ++rep) {
            std::vector<std::pair<double, int>> re_scored(eta);  // (score, doc)
            for (int i = 0; i < eta; ++i) {
                const int d = top_docs[i];
                flat.clear();
                for (const auto& tc : index.docs[d]) {
                    for (int c = 0; c < tc.count; ++c) flat.push_back(tc.term);
                }
                const int remove =
                    flat.empty() ? 0
                                 : std::max<int>(1, static_cast<int>(std::lround(
                                                        options.perturb_fraction *
                                                        static_cast<double>(flat.size()))));
                for (int r = 0; r < remove && !flat.empty(); ++r) {
                    const std::size_t pick = rng.index(flat.size());
                    flat[pick] = flat.back();
                    flat.pop_back();
                }
                std::sort(flat.begin(), flat.end());
                perturbed.clear();
                for (std::size_t p = 0; p < flat.size();) {
                    std::size_t e = p;
                    while (e < flat.size() && flat[e] == flat[p]) ++e;
                    perturbed.push_back({flat[p], static_cast<int>(e - p)});
                    p = e;
                }
                const DocView view{perturbed, static_cast<int>(flat.size())};
                re_scored[i] = {score_one(models, model, index, q, view), d};
            }
            // rank the eta docs by perturbed score, doc-id tie break
            std::vector<int> order(eta);
            for (int i = 0; i < eta; ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (re_scored[a].first != re_scored[b].first)
                    return re_scored[a].first > re_scored[b].first;
                return re_scored[a].second < re_scored[b].second;
            });
            std::vector<int> new_rank(eta);
            for (int pos = 0; pos < eta; ++pos) new_rank[order[pos]] = pos + 1;
            double d2 = 0.0;
            for (int i = 0; i < eta; ++i) {
                const double diff = (i + 1) - new_rank[i];
                d2 += diff * diff;
            }
            rho_sum += 1.0 - 6.0 * d2 /
                                 (static_cast<double>(eta) *
                                  (static_cast<double>(eta) * eta - 1.0));
        }
        out[1] = rho_sum / options.robustness_repetitions;
    }

    // (4) clustering tendency: mean pairwise similarity among the top docs
    if (eta >= 2) {
        double total = 0.0;
        for (int i = 0; i < eta; ++i) {
            for (int j = i + 1; j < eta; ++j) {
                total += models.within_similarity(corpus_side, top_docs[i], top_docs[j]);
            }
        }
        out[3] = total / (static_cast<double>(eta) * (eta - 1) / 2.0);
    }

    // (5) spatial autocorrelation: scores vs similarity-weighted neighbor means
    if (eta >= 2) {
        std::vector<double> neighbor(eta, 0.0);
        for (int i = 0; i < eta; ++i) {
            double weighted = 0.0, weight = 0.0;
            for (int j = 0; j < eta; ++j) {
                if (j == i) continue;
                const double w =
                    models.within_similarity(corpus_side, top_docs[i], top_docs[j]);
                weighted += w * top_scores[j];
                weight += w;
            }
            neighbor[i] = weight > 0.0 ? weighted / weight : 0.0;
        }
        out[4] = pearson(top_scores, neighbor);
    }

    // (6) WIG and (7) NQC against the corpus-wide mean score
    const double corpus_mean = mean_of(scores);
    double wig = 0.0;
    for (const double s : top_scores) wig += s - corpus_mean;
    out[5] = wig / (static_cast<double>(eta) * static_cast<double>(q.terms.size()));
    if (std::fabs(corpus_mean) > 0.0) {
        out[6] = stdev_of(top_scores) / std::fabs(corpus_mean);
    }
    return out;
}

std::array<double, FeatureSchema::kDocStatCount> doc_stats(const Artifact& source,
                                                           const Artifact& target) {
    const std::set<std::string> s_terms(source.tokens.begin(), source.tokens.end());
    const std::set<std::string> t_terms(target.tokens.begin(), target.tokens.end());
    std::size_t shared = 0;
    for (const auto& term : s_terms) shared += t_terms.count(term);
    const std::size_t unioned = s_terms.size() + t_terms.size() - shared;
    return {static_cast<double>(s_terms.size()), static_cast<double>(t_terms.size()),
            static_cast<double>(source.tokens.size()),
            static_cast<double>(target.tokens.size()),
            unioned > 0 ? static_cast<double>(shared) / static_cast<double>(unioned) : 0.0};
}

namespace {

/// Everything computed once per (query artifact, direction).
struct QueryFeatures {
    std::array<std::vector<int>, 7> counterpart_rank;  // per model: rank of each corpus doc
    std::array<double, FeatureSchema::kPreMetricCount> pre{};
    std::array<std::array<double, FeatureSchema::kPostMetricCount>, 5> post{};
};

QueryFeatures compute_query_features(const CorpusModels& models, Side corpus_side,
                                     const Artifact& query, int query_position,
                                     const FeatureOptions& options,
                                     std::uint64_t perturb_seed) {
    QueryFeatures qf;
    const int n = models.index(corpus_side).num_docs;
    for (std::size_t m = 0; m < kAllIrModels.size(); ++m) {
        const auto ranked = models.rank(kAllIrModels[m], corpus_side, query, query_position);
        qf.counterpart_rank[m].assign(n, 0);
        for (const auto& rd : ranked) qf.counterpart_rank[m][rd.doc] = rd.rank;
    }
    qf.pre = pre_retrieval_qq(models, corpus_side, query);
    if (options.include_post_qq) {
        for (std::size_t m = 0; m < kPostQqModels.size(); ++m) {
            qf.post[m] = post_retrieval_qq(models, corpus_side, query, query_position,
                                           kPostQqModels[m], options,
                                           derive_seed(perturb_seed, m));
        }
    }
    return qf;
}

double normalized_rank(int rank, int corpus_size) {
    if (corpus_size <= 1) return 1.0;
    return 1.0 - static_cast<double>(rank - 1) / static_cast<double>(corpus_size - 1);
}

}  // namespace

FeatureMatrix featurize(const TraceDataset& dataset, const CorpusModels& models,
                        const FeatureOptions& options, NormalizationBounds* bounds_out) {
    const auto& columns = FeatureSchema::column_names();
    const std::size_t num_sources = dataset.sources.size();
    const std::size_t num_targets = dataset.targets.size();

    // per-query work, parallel over artifacts of both sides
    std::vector<QueryFeatures> forward(num_sources);   // source queries target corpus
    std::vector<QueryFeatures> reverse(num_targets);   // target queries source corpus
    {
        ThreadPool pool(options.jobs);
        pool.parallel_for(num_sources + num_targets, [&](std::size_t i) {
            if (i < num_sources) {
                forward[i] = compute_query_features(
                    models, Side::target, dataset.sources[i], static_cast<int>(i),
                    options, derive_seed(models.config().rng_seed, i * 2));
            } else {
                const std::size_t j = i - num_sources;
                reverse[j] = compute_query_features(
                    models, Side::source, dataset.targets[j], static_cast<int>(j),
                    options, derive_seed(models.config().rng_seed, j * 2 + 1));
            }
        });
    }

    FeatureMatrix matrix;
    matrix.columns = columns;
    matrix.values.assign(num_sources * num_targets * columns.size(), 0.0);
    matrix.labels.reserve(num_sources * num_targets);

    std::size_t row = 0;
    for (std::size_t s = 0; s < num_sources; ++s) {
        for (std::size_t t = 0; t < num_targets; ++t, ++row) {
            const Artifact& src = dataset.sources[s];
            const Artifact& tgt = dataset.targets[t];
            matrix.source_ids.push_back(src.id);
            matrix.target_ids.push_back(tgt.id);
            matrix.labels.push_back(
                dataset.valid_links.count({src.id, tgt.id}) > 0 ? 1 : 0);

            double* v = &matrix.values[row * columns.size()];
            std::size_t c = 0;
            for (std::size_t m = 0; m < kAllIrModels.size(); ++m) {
                v[c++] = normalized_rank(forward[s].counterpart_rank[m][t],
                                         static_cast<int>(num_targets));
                v[c++] = normalized_rank(reverse[t].counterpart_rank[m][s],
                                         static_cast<int>(num_sources));
            }
            for (int p = 0; p < FeatureSchema::kPreMetricCount; ++p) {
                v[c++] = forward[s].pre[p];
                v[c++] = reverse[t].pre[p];
            }
            for (int p = 0; p < FeatureSchema::kPostMetricCount; ++p) {
                for (std::size_t m = 0; m < kPostQqModels.size(); ++m) {
                    v[c++] = forward[s].post[m][p];
                    v[c++] = reverse[t].post[m][p];
                }
            }
            const auto stats = doc_stats(src, tgt);
            for (const double d : stats) v[c++] = d;
            if (c != columns.size()) throw InternalError("feature row width mismatch");
        }
    }

    const NormalizationBounds bounds = compute_bounds(matrix);
    normalize_columns(matrix, bounds);
    if (bounds_out) *bounds_out = bounds;
    return matrix;
}

NormalizationBounds compute_bounds(const FeatureMatrix& matrix) {
    NormalizationBounds bounds;
    const std::size_t cols = matrix.cols();
    bounds.min.assign(cols, 0.0);
    bounds.max.assign(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
            lo = std::min(lo, matrix.at(r, c));
            hi = std::max(hi, matrix.at(r, c));
        }
        if (matrix.rows() == 0) lo = hi = 0.0;
        bounds.min[c] = lo;
        bounds.max[c] = hi;
    }
    return bounds;
}

void normalize_columns(FeatureMatrix& matrix, const NormalizationBounds& bounds) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        const double lo = bounds.min[c];
        const double span = bounds.max[c] - lo;
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
            double& v = matrix.at(r, c);
            v = span > 0.0 ? std::clamp((v - lo) / span, 0.0, 1.0) : 0.0;
        }
    }
}

void save_feature_csv(const FeatureMatrix& matrix, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write feature CSV: " + file.string());
    out << "source_id,target_id";
    for (const auto& c : matrix.columns) out << ',' << c;
    out << ",label\n";
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        out << matrix.source_ids[r] << ',' << matrix.target_ids[r];
        for (std::size_t c = 0; c < matrix.cols(); ++c) {
            out << ',' << format_double(matrix.at(r, c));
        }
        out << ',' << static_cast<int>(matrix.labels[r]) << '\n';
    }
}

FeatureMatrix load_feature_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot read feature CSV: " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty feature CSV: " + file.string());

    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= s.size(); ++i) {
            if (i == s.size() || s[i] == ',') {
                parts.push_back(s.substr(start, i - start));
                start = i + 1;
            }
        }
        return parts;
    };

    FeatureMatrix matrix;
    auto header = split(line);
    if (header.size() < 4 || header.front() != "source_id" || header.back() != "label") {
        throw DataError("malformed feature CSV header: " + file.string());
    }
    matrix.columns.assign(header.begin() + 2, header.end() - 1);

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto parts = split(line);
        if (parts.size() != header.size()) {
            throw DataError("feature CSV row width mismatch in " + file.string());
        }
        matrix.source_ids.push_back(parts[0]);
        matrix.target_ids.push_back(parts[1]);
        for (std::size_t c = 0; c < matrix.columns.size(); ++c) {
            matrix.values.push_back(std::stod(parts[2 + c]));
        }
        matrix.labels.push_back(parts.back() == "1" ? 1 : 0);
    }
    return matrix;
}

void save_bounds_json(const NormalizationBounds& bounds,
                      const std::vector<std::string>& columns,
                      std::uint64_t config_hash, const std::filesystem::path& file) {
    json j;
    j["config_hash"] = config_hash;
    json cols = json::array();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        cols.push_back({{"name", columns[c]}, {"min", bounds.min[c]}, {"max", bounds.max[c]}});
    }
    j["columns"] = cols;
    std::ofstream out(file);
    if (!out) throw DataError("cannot write normalization sidecar: " + file.string());
    out << j.dump(2) << '\n';
}

std::optional<std::uint64_t> read_bounds_config_hash(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) return std::nullopt;
    try {
        json j;
        in >> j;
        return j.at("config_hash").get<std::uint64_t>();
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

}  // namespace tlr
