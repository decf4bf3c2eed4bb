#include "tlr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tlr/common.hpp"
#include "tlr/threadpool.hpp"

namespace tlr {

using nlohmann::json;

Prf prf(const ConfusionMatrix& cm) {
    Prf out;
    out.precision = cm.tp + cm.fp > 0
                        ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp)
                        : 0.0;
    out.recall = cm.tp + cm.fn > 0
                     ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn)
                     : 0.0;
    out.fscore = out.precision + out.recall > 0.0
                     ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                     : 0.0;
    return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(
    const std::vector<std::uint8_t>& labels, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count must be at least 2");
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] ? positives : negatives).push_back(i);
    }
    if (positives.size() < static_cast<std::size_t>(k) ||
        negatives.size() < static_cast<std::size_t>(k)) {
        throw DataError("stratified folds need at least k rows of each class (k=" +
                        std::to_string(k) + ", positives=" +
                        std::to_string(positives.size()) + ", negatives=" +
                        std::to_string(negatives.size()) + ")");
    }
    Rng rng(seed);
    rng.shuffle(positives);
    rng.shuffle(negatives);

    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < positives.size(); ++i) {
        folds[i % k].push_back(positives[i]);
    }
    for (std::size_t i = 0; i < negatives.size(); ++i) {
        folds[i % k].push_back(negatives[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

std::string describe_pipeline(const PipelineConfig& config) {
    std::ostringstream out;
    out << "selection=" << selection_method_name(config.selection)
        << "\nselection_threshold=" << format_double(config.selection_threshold)
        << "\nselection_scope="
        << (config.selection_scope == SelectionScope::fold ? "fold" : "dataset")
        << "\nrebalance=" << rebalance_method_name(config.rebalance)
        << "\nsmote_k=" << config.smote_k
        << "\nclassifier=" << algorithm_name(config.classifier)
        << "\ntrials=" << config.trials << "\nfolds=" << config.folds
        << "\nseed=" << config.seed << "\nrf_trees=" << config.hyperparams.rf_trees
        << "\nknn_k=" << config.hyperparams.knn_k
        << "\nlogistic_ridge=" << format_double(config.hyperparams.logistic_ridge)
        << "\nsvm_c=" << format_double(config.hyperparams.svm_c)
        << "\nsvm_gamma=" << format_double(config.hyperparams.svm_gamma) << "\n";
    return out.str();
}

std::string pipeline_label(const PipelineConfig& config) {
    return selection_method_name(config.selection) + "+" +
           rebalance_method_name(config.rebalance) + "+" +
           algorithm_name(config.classifier);
}

namespace {

struct FoldOutcome {
    ConfusionMatrix confusion;
};

Table matrix_rows_to_table(const FeatureMatrix& matrix,
                           const std::vector<std::size_t>& rows,
                           const std::vector<int>& kept) {
    Table t;
    t.cols = kept.size();
    t.values.reserve(rows.size() * kept.size());
    t.labels.reserve(rows.size());
    for (const std::size_t r : rows) {
        for (const int c : kept) t.values.push_back(matrix.at(r, c));
        t.labels.push_back(matrix.labels[r]);
    }
    return t;
}

FeatureMatrix submatrix_rows(const FeatureMatrix& matrix,
                             const std::vector<std::size_t>& rows) {
    FeatureMatrix out;
    out.columns = matrix.columns;
    out.values.reserve(rows.size() * matrix.cols());
    for (const std::size_t r : rows) {
        const double* begin = &matrix.values[r * matrix.cols()];
        out.values.insert(out.values.end(), begin, begin + matrix.cols());
        out.labels.push_back(matrix.labels[r]);
        out.source_ids.push_back(matrix.source_ids.empty() ? "" : matrix.source_ids[r]);
        out.target_ids.push_back(matrix.target_ids.empty() ? "" : matrix.target_ids[r]);
    }
    return out;
}

}  // namespace

CvReport run_cv(const FeatureMatrix& matrix, const PipelineConfig& config,
                const std::string& dataset_name) {
    CvReport report;
    report.dataset = dataset_name;
    report.config_text = describe_pipeline(config);
    report.config_hash = fnv1a(report.config_text);
    report.trials = config.trials;
    report.folds = config.folds;

    // dataset-scope selection is fit once, on the full matrix
    std::vector<int> dataset_kept;
    if (config.selection_scope == SelectionScope::dataset) {
        dataset_kept =
            select(matrix, config.selection, config.selection_threshold).kept_indices;
    }

    const int total_tasks = config.trials * config.folds;
    std::vector<FoldOutcome> outcomes(total_tasks);

    // fold assignments per trial are cheap; precompute them serially for
    // deterministic seeds, then run the heavy fold work in parallel
    std::vector<std::vector<std::vector<std::size_t>>> trial_folds(config.trials);
    for (int t = 0; t < config.trials; ++t) {
        trial_folds[t] =
            stratified_folds(matrix.labels, config.folds, derive_seed(config.seed, t));
    }

    ThreadPool pool(config.jobs);
    pool.parallel_for(total_tasks, [&](std::size_t task) {
        const int trial = static_cast<int>(task) / config.folds;
        const int fold = static_cast<int>(task) % config.folds;
        const auto& folds = trial_folds[trial];

        std::vector<std::size_t> train_rows;
        train_rows.reserve(matrix.rows() - folds[fold].size());
        for (int f = 0; f < config.folds; ++f) {
            if (f == fold) continue;
            train_rows.insert(train_rows.end(), folds[f].begin(), folds[f].end());
        }
        std::sort(train_rows.begin(), train_rows.end());
        const auto& test_rows = folds[fold];

        std::vector<int> kept;
        if (config.selection_scope == SelectionScope::dataset) {
            kept = dataset_kept;
        } else {
            const FeatureMatrix train_matrix = submatrix_rows(matrix, train_rows);
            kept = select(train_matrix, config.selection, config.selection_threshold)
                       .kept_indices;
        }
        if (kept.empty()) {
            // nothing survived selection: predict the majority class (invalid)
            FoldOutcome outcome;
            for (const std::size_t r : test_rows) {
                if (matrix.labels[r]) ++outcome.confusion.fn;
                else ++outcome.confusion.tn;
            }
            outcomes[task] = outcome;
            return;
        }

        Table train_table = matrix_rows_to_table(matrix, train_rows, kept);
        RebalanceConfig rebalance_config;
        rebalance_config.method = config.rebalance;
        rebalance_config.smote_k = config.smote_k;
        rebalance_config.rng_seed = derive_seed(config.seed, 7919 + task);
        train_table = rebalance(train_table, rebalance_config);

        std::vector<std::string> schema;
        schema.reserve(kept.size());
        for (const int c : kept) schema.push_back(matrix.columns[c]);
        Hyperparams hp = config.hyperparams;
        hp.jobs = 1;  // parallelism lives at the fold level here
        const auto model = train(config.classifier, train_table, schema, hp,
                                 derive_seed(config.seed, 104729 + task));

        FoldOutcome outcome;
        std::vector<double> row(kept.size());
        for (const std::size_t r : test_rows) {
            for (std::size_t c = 0; c < kept.size(); ++c) row[c] = matrix.at(r, kept[c]);
            const bool predicted = model->predict(row).label;
            const bool actual = matrix.labels[r] != 0;
            if (predicted && actual) ++outcome.confusion.tp;
            else if (predicted && !actual) ++outcome.confusion.fp;
            else if (!predicted && actual) ++outcome.confusion.fn;
            else ++outcome.confusion.tn;
        }
        outcomes[task] = outcome;
    });

    double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0, sum_pred = 0.0;
    for (int t = 0; t < config.trials; ++t) {
        TrialResult trial;
        trial.trial = t;
        for (int f = 0; f < config.folds; ++f) {
            const auto& cm = outcomes[t * config.folds + f].confusion;
            trial.confusion.tp += cm.tp;
            trial.confusion.fp += cm.fp;
            trial.confusion.tn += cm.tn;
            trial.confusion.fn += cm.fn;
        }
        trial.scores = prf(trial.confusion);
        report.precision.push_back(trial.scores.precision);
        report.recall.push_back(trial.scores.recall);
        report.fscore.push_back(trial.scores.fscore);
        sum_p += trial.scores.precision;
        sum_r += trial.scores.recall;
        sum_f += trial.scores.fscore;
        sum_pred += static_cast<double>(trial.confusion.predicted_positives());
        report.trial_results.push_back(trial);
    }
    const double n = static_cast<double>(config.trials);
    report.mean_precision = sum_p / n;
    report.mean_recall = sum_r / n;
    report.mean_fscore = sum_f / n;
    report.mean_predicted_positives = sum_pred / n;
    return report;
}

std::vector<double> pooled_scores_for_model(const TraceDataset& dataset,
                                            const CorpusModels& models, IrModel model) {
    std::vector<double> pooled;
    pooled.reserve(dataset.candidate_count());
    for (std::size_t s = 0; s < dataset.sources.size(); ++s) {
        auto scores = models.score_all(model, Side::target, dataset.sources[s],
                                       static_cast<int>(s));
        if (model == IrModel::lm_dirichlet || model == IrModel::lm_jm) {
            const TermIndex& index = models.index(Side::target);
            const IndexedQuery q = make_query(index, dataset.sources[s].tokens);
            double scored_tokens = 0.0, background = 0.0;
            for (const auto& qt : q.terms) {
                scored_tokens += qt.count;
                background += qt.count * std::log(index.collection_prob(qt.term));
            }
            const double len = std::max(1.0, scored_tokens);
            for (auto& v : scores) v = (v - background) / len;
        }
        pooled.insert(pooled.end(), scores.begin(), scores.end());
    }
    return pooled;
}

std::vector<std::vector<double>> pooled_pair_scores(const TraceDataset& dataset,
                                                    const CorpusModels& models) {
    std::vector<std::vector<double>> pooled;
    pooled.reserve(kAllIrModels.size());
    for (const IrModel model : kAllIrModels) {
        pooled.push_back(pooled_scores_for_model(dataset, models, model));
    }
    return pooled;
}

IrBaselineResult ir_baseline_from_scores(const std::vector<double>& scores,
                                         const std::vector<std::uint8_t>& labels,
                                         IrModel model, long long k) {
    if (k < 1) throw ConfigError("cut point must be at least 1");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    // stable sort keeps ties in link order, i.e. ascending (source_id, target_id)
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    IrBaselineResult result;
    result.model = model;
    result.cut_point = std::min<long long>(k, static_cast<long long>(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        const bool predicted = static_cast<long long>(i) < result.cut_point;
        const bool actual = labels[order[i]] != 0;
        if (predicted && actual) ++result.confusion.tp;
        else if (predicted && !actual) ++result.confusion.fp;
        else if (!predicted && actual) ++result.confusion.fn;
        else ++result.confusion.tn;
    }
    result.scores = prf(result.confusion);
    return result;
}

IrBaselineResult best_ir_from_scores(const std::vector<std::vector<double>>& all_scores,
                                     const std::vector<std::uint8_t>& labels,
                                     long long k) {
    IrBaselineResult best;
    bool first = true;
    for (std::size_t m = 0; m < kAllIrModels.size(); ++m) {
        IrBaselineResult candidate =
            ir_baseline_from_scores(all_scores[m], labels, kAllIrModels[m], k);
        if (first || candidate.scores.fscore > best.scores.fscore) {
            best = candidate;
            first = false;
        }
    }
    return best;
}

namespace {

std::vector<std::uint8_t> link_labels(const TraceDataset& dataset) {
    std::vector<std::uint8_t> labels;
    labels.reserve(dataset.candidate_count());
    for (const auto& s : dataset.sources) {
        for (const auto& t : dataset.targets) {
            labels.push_back(dataset.valid_links.count({s.id, t.id}) > 0 ? 1 : 0);
        }
    }
    return labels;
}

}  // namespace

IrBaselineResult ir_baseline_at_k(const TraceDataset& dataset,
                                  const CorpusModels& models, IrModel model,
                                  long long k) {
    return ir_baseline_from_scores(pooled_scores_for_model(dataset, models, model),
                                   link_labels(dataset), model, k);
}

IrBaselineResult best_ir(const TraceDataset& dataset, const CorpusModels& models,
                         long long k) {
    return best_ir_from_scores(pooled_pair_scores(dataset, models),
                               link_labels(dataset), k);
}

namespace {

MetricComparison compare_metric(const std::string& name,
                                const std::vector<double>& distribution,
                                double ir_value, double alpha) {
    MetricComparison out;
    out.metric = name;
    out.ir_value = ir_value;
    out.trail_mean = sample_mean(distribution);

    const auto sw = shapiro_wilk(distribution);
    out.shapiro_p = sw.p;
    out.shapiro_degenerate = sw.degenerate;
    out.normal = !sw.degenerate && sw.p > alpha;
    if (out.normal) {
        out.test = "t";
        out.p_raw = one_sample_t(distribution, ir_value);
    } else {
        out.test = "wilcoxon";
        out.p_raw = wilcoxon_signed_rank(distribution, ir_value);
    }
    out.effect_size = effect_size_vs_point(distribution, ir_value);
    return out;
}

}  // namespace

namespace {

CompareReport finish_compare(std::string dataset_name, IrBaselineResult ir,
                             const CvReport& cv, double alpha) {
    CompareReport report;
    report.dataset = std::move(dataset_name);
    report.cv = cv;
    report.alpha = alpha;
    report.ir = std::move(ir);

    report.precision =
        compare_metric("precision", cv.precision, report.ir.scores.precision, alpha);
    report.recall = compare_metric("recall", cv.recall, report.ir.scores.recall, alpha);
    report.fscore = compare_metric("fscore", cv.fscore, report.ir.scores.fscore, alpha);

    // Holm over the three metric p-values of this dataset
    const auto adjusted = holm_bonferroni(
        {report.precision.p_raw, report.recall.p_raw, report.fscore.p_raw});
    report.precision.p_adjusted = adjusted[0];
    report.recall.p_adjusted = adjusted[1];
    report.fscore.p_adjusted = adjusted[2];
    for (MetricComparison* m : {&report.precision, &report.recall, &report.fscore}) {
        m->significant_win = m->p_adjusted < alpha && m->trail_mean > m->ir_value;
    }
    return report;
}

}  // namespace

CompareReport compare_vs_ir(const TraceDataset& dataset, const CorpusModels& models,
                            const CvReport& cv, double alpha) {
    const long long k =
        std::max<long long>(1, std::llround(cv.mean_predicted_positives));
    return finish_compare(dataset.name, best_ir(dataset, models, k), cv, alpha);
}

CompareReport compare_vs_ir_scores(const std::string& dataset_name,
                                   const std::vector<std::vector<double>>& pooled_scores,
                                   const std::vector<std::uint8_t>& labels,
                                   const CvReport& cv, double alpha) {
    const long long k =
        std::max<long long>(1, std::llround(cv.mean_predicted_positives));
    return finish_compare(dataset_name, best_ir_from_scores(pooled_scores, labels, k),
                          cv, alpha);
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

namespace {

json confusion_json(const ConfusionMatrix& cm) {
    return {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

json cv_json(const CvReport& report) {
    json trials = json::array();
    for (const auto& t : report.trial_results) {
        trials.push_back({{"trial", t.trial},
                          {"confusion", confusion_json(t.confusion)},
                          {"precision", t.scores.precision},
                          {"recall", t.scores.recall},
                          {"fscore", t.scores.fscore}});
    }
    return {{"dataset", report.dataset},
            {"config_hash", report.config_hash},
            {"config", report.config_text},
            {"trials", report.trials},
            {"folds", report.folds},
            {"per_trial", trials},
            {"precision", report.precision},
            {"recall", report.recall},
            {"fscore", report.fscore},
            {"mean_precision", report.mean_precision},
            {"mean_recall", report.mean_recall},
            {"mean_fscore", report.mean_fscore},
            {"mean_predicted_positives", report.mean_predicted_positives}};
}

json comparison_json(const MetricComparison& m) {
    return {{"metric", m.metric},
            {"ir_value", m.ir_value},
            {"mean", m.trail_mean},
            {"shapiro_p", m.shapiro_p},
            {"shapiro_degenerate", m.shapiro_degenerate},
            {"normal", m.normal},
            {"test", m.test},
            {"p_raw", m.p_raw},
            {"p_adjusted", m.p_adjusted},
            {"effect_size",
             std::isinf(m.effect_size) ? json("inf") : json(m.effect_size)},
            {"significant_win", m.significant_win}};
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
    return buf;
}

}  // namespace

void save_cv_report_json(const CvReport& report, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write report: " + file.string());
    out << cv_json(report).dump(2) << '\n';
}

void append_trials_csv(const CvReport& report, const std::string& config_label,
                       std::ostream& out, bool header) {
    if (header) out << "dataset,config,trial,precision,recall,fscore\n";
    for (const auto& t : report.trial_results) {
        out << report.dataset << ',' << config_label << ',' << t.trial << ','
            << format_double(t.scores.precision) << ','
            << format_double(t.scores.recall) << ','
            << format_double(t.scores.fscore) << '\n';
    }
}

void save_compare_json(const std::vector<CompareReport>& reports,
                       const std::filesystem::path& file) {
    json out = json::array();
    for (const auto& r : reports) {
        out.push_back({{"dataset", r.dataset},
                       {"alpha", r.alpha},
                       {"cv", cv_json(r.cv)},
                       {"best_ir",
                        {{"model", ir_model_name(r.ir.model)},
                         {"cut_point", r.ir.cut_point},
                         {"confusion", confusion_json(r.ir.confusion)},
                         {"precision", r.ir.scores.precision},
                         {"recall", r.ir.scores.recall},
                         {"fscore", r.ir.scores.fscore}}},
                       {"comparisons",
                        {comparison_json(r.precision), comparison_json(r.recall),
                         comparison_json(r.fscore)}}});
    }
    std::ofstream f(file);
    if (!f) throw DataError("cannot write comparison report: " + file.string());
    f << out.dump(2) << '\n';
}

void save_compare_markdown(const std::vector<CompareReport>& reports,
                           const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write comparison report: " + file.string());
    out << "| Dataset | Precision(%) | Recall(%) | F-score(%) | Best IR | "
           "Precision@K(%) | Recall@K(%) | F-score@K(%) |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    double sp = 0, sr = 0, sf = 0, ip = 0, ir = 0, iff = 0;
    for (const auto& r : reports) {
        auto star = [&](const MetricComparison& m) {
            return m.significant_win ? std::string("*") : std::string("");
        };
        out << "| " << r.dataset << " | " << percent(r.cv.mean_precision) << " | "
            << percent(r.cv.mean_recall) << " | " << percent(r.cv.mean_fscore) << " | "
            << ir_model_name(r.ir.model) << " | "
            << percent(r.ir.scores.precision) << star(r.precision) << " | "
            << percent(r.ir.scores.recall) << star(r.recall) << " | "
            << percent(r.ir.scores.fscore) << star(r.fscore) << " |\n";
        sp += r.cv.mean_precision;
        sr += r.cv.mean_recall;
        sf += r.cv.mean_fscore;
        ip += r.ir.scores.precision;
        ir += r.ir.scores.recall;
        iff += r.ir.scores.fscore;
    }
    if (!reports.empty()) {
        const double n = static_cast<double>(reports.size());
        out << "| **Average** | " << percent(sp / n) << " | " << percent(sr / n)
            << " | " << percent(sf / n) << " | | " << percent(ip / n) << " | "
            << percent(ir / n) << " | " << percent(iff / n) << " |\n";
    }
    out << "\n`*` = IR baseline statistically below the classifier "
           "(adjusted p < alpha).\n";
}

GridReport grid_compare(std::vector<GridCell> cells) {
    GridReport report;
    report.cells = std::move(cells);
    if (report.cells.empty()) return report;

    report.best_cell = 0;
    for (std::size_t i = 1; i < report.cells.size(); ++i) {
        if (report.cells[i].mean_fscore > report.cells[report.best_cell].mean_fscore) {
            report.best_cell = i;
        }
    }
    const auto& best = report.cells[report.best_cell].pooled_fscores;
    std::vector<double> raw;
    std::vector<std::size_t> tested;
    for (std::size_t i = 0; i < report.cells.size(); ++i) {
        if (i == report.best_cell) continue;
        raw.push_back(mann_whitney_u(report.cells[i].pooled_fscores, best).p);
        report.cells[i].cliffs = cliffs_delta(report.cells[i].pooled_fscores, best);
        tested.push_back(i);
    }
    const auto adjusted = holm_bonferroni(raw);
    for (std::size_t i = 0; i < tested.size(); ++i) {
        report.cells[tested[i]].p_vs_best = adjusted[i];
    }
    report.cells[report.best_cell].p_vs_best = 1.0;
    report.cells[report.best_cell].cliffs = 0.0;
    return report;
}

void save_grid_markdown(const GridReport& report,
                        const std::vector<RebalanceMethod>& rebalancers,
                        const std::vector<SelectionMethod>& selections,
                        const std::vector<Algorithm>& classifiers,
                        const std::filesystem::path& file) {
    auto find_cell = [&](RebalanceMethod r, SelectionMethod s,
                         Algorithm a) -> const GridCell* {
        for (const auto& cell : report.cells) {
            if (cell.rebalance == r && cell.selection == s && cell.classifier == a) {
                return &cell;
            }
        }
        return nullptr;
    };

    std::ofstream out(file);
    if (!out) throw DataError("cannot write grid report: " + file.string());
    out << "| Rebalancing | Selection |";
    for (const Algorithm a : classifiers) out << ' ' << algorithm_name(a) << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < classifiers.size(); ++i) out << "---|";
    out << '\n';
    for (const RebalanceMethod r : rebalancers) {
        for (const SelectionMethod s : selections) {
            out << "| " << rebalance_method_name(r) << " | "
                << selection_method_name(s) << " |";
            for (const Algorithm a : classifiers) {
                const GridCell* cell = find_cell(r, s, a);
                if (!cell) {
                    out << " - |";
                    continue;
                }
                const bool is_best = cell == &report.cells[report.best_cell];
                std::string mark;
                if (!is_best && cell->p_vs_best < 0.01) {
                    const auto magnitude = cliffs_magnitude(cell->cliffs);
                    mark = magnitude == EffectMagnitude::negligible ||
                                   magnitude == EffectMagnitude::small
                               ? "+"
                               : "*";
                }
                out << ' ' << percent(cell->mean_fscore) << mark;
                if (is_best) out << " (best)";
                out << " |";
            }
            out << '\n';
        }
    }
    out << "\n`*` = significantly below the best cell (p < 0.01, medium/large "
           "effect); `+` = significantly below with a small or negligible "
           "effect.\n";
}

void save_grid_json(const GridReport& report, const std::filesystem::path& file) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"rebalance", rebalance_method_name(c.rebalance)},
                         {"selection", selection_method_name(c.selection)},
                         {"classifier", algorithm_name(c.classifier)},
                         {"mean_fscore", c.mean_fscore},
                         {"p_vs_best", c.p_vs_best},
                         {"cliffs_delta", c.cliffs}});
    }
    json j{{"cells", cells}, {"best_cell", report.best_cell}};
    std::ofstream out(file);
    if (!out) throw DataError("cannot write grid report: " + file.string());
    out << j.dump(2) << '\n';
}

}  // namespace tlr
