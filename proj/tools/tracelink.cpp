#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlr/cache.hpp"
#include "tlr/common.hpp"
#include "tlr/corpus.hpp"
#include "tlr/datagen.hpp"
#include "tlr/eval.hpp"
#include "tlr/features.hpp"
#include "tlr/selection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tlr;

namespace {

struct CommonOptions {
    std::string data_dir;
    std::string language = "english";
    bool language_given = false;
    std::string out = "out";
    int jobs = 2;
    std::uint64_t seed = 17;
};

struct FeaturizeOptions {
    ModelConfig model;
    FeatureOptions features;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--data-dir", opts.data_dir, "directory with stoplists");
    cmd->add_option("--language", opts.language, "english or italian")
        ->check(CLI::IsMember({"english", "italian", "en", "it"}))
        ->trigger_on_parse()
        ->each([&opts](const std::string&) { opts.language_given = true; });
    cmd->add_option("--out", opts.out, "output directory");
    cmd->add_option("--jobs", opts.jobs, "worker threads");
    cmd->add_option("--seed", opts.seed, "master RNG seed");
}

void add_model_options(CLI::App* cmd, FeaturizeOptions& opts) {
    cmd->add_option("--lsa-rank", opts.model.lsa_rank);
    cmd->add_option("--lda-topics", opts.model.lda_topics);
    cmd->add_option("--lda-iterations", opts.model.lda_iterations);
    cmd->add_option("--bm25-k1", opts.model.bm25_k1);
    cmd->add_option("--bm25-b", opts.model.bm25_b);
    cmd->add_option("--dirichlet-mu", opts.model.dirichlet_mu);
    cmd->add_option("--jm-lambda", opts.model.jm_lambda);
    cmd->add_option("--eta", opts.features.result_depth, "post-retrieval list depth");
    cmd->add_option("--robustness-reps", opts.features.robustness_repetitions);
    cmd->add_flag("!--no-post-qq", opts.features.include_post_qq,
                  "skip post-retrieval metrics (61-column matrix)");
}

struct PipelineOptions {
    std::string selection = "correlation";
    double selection_threshold = 1e-6;
    std::string selection_scope = "fold";
    std::string rebalance = "smote";
    int smote_k = 5;
    std::string classifier = "random_forest";
    int trials = 50;
    int folds = 10;
    int rf_trees = 100;
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions& opts) {
    cmd->add_option("--selection", opts.selection,
                    "none|cfs|correlation|gainRatio|infoGain|symmetrical");
    cmd->add_option("--selection-threshold", opts.selection_threshold);
    cmd->add_option("--selection-scope", opts.selection_scope)
        ->check(CLI::IsMember({"fold", "dataset"}));
    cmd->add_option("--rebalance", opts.rebalance, "none|smote|undersampling|5050");
    cmd->add_option("--smote-k", opts.smote_k);
    cmd->add_option("--classifier", opts.classifier,
                    "5nn|naive_bayes|logistic|random_forest|svm|vote");
    cmd->add_option("--trials", opts.trials);
    cmd->add_option("--folds", opts.folds);
    cmd->add_option("--rf-trees", opts.rf_trees);
}

PipelineConfig make_pipeline(const PipelineOptions& opts, const CommonOptions& common) {
    PipelineConfig config;
    config.selection = parse_selection_method(opts.selection);
    config.selection_threshold = opts.selection_threshold;
    config.selection_scope = opts.selection_scope == "dataset" ? SelectionScope::dataset
                                                               : SelectionScope::fold;
    config.rebalance = parse_rebalance_method(opts.rebalance);
    config.smote_k = opts.smote_k;
    config.classifier = parse_algorithm(opts.classifier);
    config.trials = opts.trials;
    config.folds = opts.folds;
    config.seed = common.seed;
    config.jobs = common.jobs;
    config.hyperparams.rf_trees = opts.rf_trees;
    return config;
}

Language effective_language(const CommonOptions& common, const fs::path& dataset_dir) {
    const Language flag_language = parse_language(common.language);
    if (common.language_given) return flag_language;
    return dataset_language_hint(dataset_dir, flag_language);
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::string& config_text,
                    const std::vector<std::string>& outputs) {
    json manifest{{"command", command},
                  {"config", config_text},
                  {"config_hash", fnv1a(config_text)},
                  {"outputs", outputs}};
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

TraceDataset load_with_language(const fs::path& dir, const CommonOptions& common) {
    const Language lang = effective_language(common, dir);
    const Preprocessor pre(lang, find_data_dir(common.data_dir));
    return load_dataset(dir, pre);
}

/// Featurizes into out_dir with caching keyed on the config + content hash.
FeatureMatrix featurize_cached(const TraceDataset& dataset, const fs::path& dataset_dir,
                               const CommonOptions& common, FeaturizeOptions opts,
                               bool quiet = false) {
    (void)dataset_dir;
    opts.model.rng_seed = common.seed;
    opts.features.jobs = common.jobs;
    DatasetArtifacts artifacts = load_or_build_artifacts(
        dataset, opts.model, opts.features, fs::path(common.out));
    if (!artifacts.from_cache) {
        const std::string config_text = featurize_config_text(
            opts.model, opts.features, dataset.language, dataset_content_hash(dataset));
        write_manifest(fs::path(common.out) / dataset.name, "featurize", config_text,
                       {"features.csv", "features_minmax.json", "pair_scores.bin"});
    }
    if (!quiet) {
        if (artifacts.from_cache) {
            std::cout << dataset.name << ": features cached\n";
        } else {
            std::cout << dataset.name << ": " << artifacts.features.rows() << " rows x "
                      << artifacts.features.cols() << " feature columns\n";
        }
    }
    return std::move(artifacts.features);
}

void dump_rankings_csv(const TraceDataset& ds, const ModelConfig& model_config,
                       const fs::path& file) {
    const CorpusModels models(ds, model_config);
    std::ofstream out(file);
    if (!out) throw DataError("cannot write rankings dump: " + file.string());
    out << "query_id,doc_id,model,score,rank\n";
    auto emit = [&](Side corpus_side, const std::vector<Artifact>& queries) {
        const auto& corpus_ids = models.index(corpus_side).doc_ids;
        for (std::size_t q = 0; q < queries.size(); ++q) {
            for (const IrModel m : kAllIrModels) {
                for (const auto& rd :
                     models.rank(m, corpus_side, queries[q], static_cast<int>(q))) {
                    out << queries[q].id << ',' << corpus_ids[rd.doc] << ','
                        << ir_model_name(m) << ',' << format_double(rd.score) << ','
                        << rd.rank << '\n';
                }
            }
        }
    };
    emit(Side::target, ds.sources);
    emit(Side::source, ds.targets);
}

int run_ingest(const std::string& dataset_dir, const CommonOptions& common,
               const std::string& dump_tokens) {
    const TraceDataset ds = load_with_language(dataset_dir, common);
    if (ds.sources.empty() || ds.targets.empty()) {
        throw DataError("dataset has an empty artifact side: " + dataset_dir);
    }
    const std::size_t candidates = ds.candidate_count();
    const double ratio =
        candidates > 0 ? 100.0 * static_cast<double>(ds.valid_count()) /
                             static_cast<double>(candidates)
                       : 0.0;
    char pct[16];
    std::snprintf(pct, sizeof(pct), "%.2f", ratio);
    std::cout << ds.name << ": " << ds.sources.size() << " sources x "
              << ds.targets.size() << " targets = " << candidates << " candidates, "
              << ds.invalid_count() << " invalid, " << ds.valid_count() << " valid ("
              << pct << "%)\n";
    if (!dump_tokens.empty()) {
        dump_tokens_jsonl(ds, dump_tokens);
        std::cout << "tokens dumped to " << dump_tokens << '\n';
    }
    return 0;
}

int run_cv_command(const std::string& dataset_dir, const CommonOptions& common,
                   const FeaturizeOptions& fopts, const PipelineOptions& popts) {
    const TraceDataset ds = load_with_language(dataset_dir, common);
    const FeatureMatrix matrix = featurize_cached(ds, dataset_dir, common, fopts);
    const PipelineConfig config = make_pipeline(popts, common);
    const CvReport report = run_cv(matrix, config, ds.name);

    const fs::path dir = fs::path(common.out) / ds.name;
    fs::create_directories(dir);
    save_cv_report_json(report, dir / "cv_report.json");
    std::ofstream csv(dir / "cv_trials.csv");
    append_trials_csv(report, pipeline_label(config), csv, true);
    std::ofstream md(dir / "cv_report.md");
    md << "# Cross-validation: " << ds.name << "\n\n"
       << "| Metric | Mean |\n|---|---|\n"
       << "| precision | " << format_double(report.mean_precision) << " |\n"
       << "| recall | " << format_double(report.mean_recall) << " |\n"
       << "| fscore | " << format_double(report.mean_fscore) << " |\n"
       << "| predicted positives | "
       << format_double(report.mean_predicted_positives) << " |\n";
    write_manifest(dir, "cv", report.config_text,
                   {"cv_report.json", "cv_trials.csv", "cv_report.md"});
    std::cout << ds.name << ": mean P=" << format_double(report.mean_precision, 4)
              << " R=" << format_double(report.mean_recall, 4)
              << " F=" << format_double(report.mean_fscore, 4) << "\n";
    return 0;
}

int run_compare(const std::vector<std::string>& dataset_dirs,
                const CommonOptions& common, const FeaturizeOptions& fopts,
                const PipelineOptions& popts) {
    std::vector<CompareReport> reports;
    for (const auto& dir : dataset_dirs) {
        const TraceDataset ds = load_with_language(dir, common);
        FeaturizeOptions opts = fopts;
        opts.model.rng_seed = common.seed;
        const FeatureMatrix matrix = featurize_cached(ds, dir, common, opts);
        const PipelineConfig config = make_pipeline(popts, common);
        const CvReport cv = run_cv(matrix, config, ds.name);
        const CorpusModels models(ds, opts.model);
        reports.push_back(compare_vs_ir(ds, models, cv));
        const auto& r = reports.back();
        std::cout << ds.name << ": classifier F=" << format_double(r.cv.mean_fscore, 4)
                  << " vs best IR (" << ir_model_name(r.ir.model)
                  << ") F@K=" << format_double(r.ir.scores.fscore, 4)
                  << (r.fscore.significant_win ? " *" : "") << "\n";
    }
    fs::create_directories(common.out);
    save_compare_json(reports, fs::path(common.out) / "compare.json");
    save_compare_markdown(reports, fs::path(common.out) / "compare.md");
    std::cout << "reports written to " << common.out << "\n";
    return 0;
}

int run_grid(const std::vector<std::string>& dataset_dirs, const CommonOptions& common,
             const FeaturizeOptions& fopts, const PipelineOptions& popts,
             const std::vector<std::string>& classifiers,
             const std::vector<std::string>& rebalancers,
             const std::vector<std::string>& selections) {
    std::vector<Algorithm> algs;
    for (const auto& c : classifiers) algs.push_back(parse_algorithm(c));
    std::vector<RebalanceMethod> rebs;
    for (const auto& r : rebalancers) rebs.push_back(parse_rebalance_method(r));
    std::vector<SelectionMethod> sels;
    for (const auto& s : selections) sels.push_back(parse_selection_method(s));

    std::vector<std::pair<TraceDataset, FeatureMatrix>> data;
    for (const auto& dir : dataset_dirs) {
        TraceDataset ds = load_with_language(dir, common);
        FeatureMatrix matrix = featurize_cached(ds, dir, common, fopts);
        data.emplace_back(std::move(ds), std::move(matrix));
    }

    std::vector<GridCell> cells;
    for (const RebalanceMethod reb : rebs) {
        for (const SelectionMethod sel : sels) {
            for (const Algorithm alg : algs) {
                GridCell cell;
                cell.rebalance = reb;
                cell.selection = sel;
                cell.classifier = alg;
                double f_sum = 0.0;
                for (const auto& [ds, matrix] : data) {
                    PipelineOptions cell_opts = popts;
                    cell_opts.selection = selection_method_name(sel);
                    cell_opts.rebalance = rebalance_method_name(reb);
                    cell_opts.classifier = algorithm_name(alg);
                    const PipelineConfig config = make_pipeline(cell_opts, common);
                    const CvReport report = run_cv(matrix, config, ds.name);
                    f_sum += report.mean_fscore;
                    cell.pooled_fscores.insert(cell.pooled_fscores.end(),
                                               report.fscore.begin(),
                                               report.fscore.end());
                }
                cell.mean_fscore = f_sum / static_cast<double>(data.size());
                std::cout << rebalance_method_name(reb) << "/"
                          << selection_method_name(sel) << "/" << algorithm_name(alg)
                          << ": mean F=" << format_double(cell.mean_fscore, 4) << "\n";
                cells.push_back(std::move(cell));
            }
        }
    }
    const GridReport report = grid_compare(std::move(cells));
    fs::create_directories(common.out);
    save_grid_json(report, fs::path(common.out) / "grid.json");
    save_grid_markdown(report, rebs, sels, algs, fs::path(common.out) / "grid.md");
    const auto& best = report.cells[report.best_cell];
    std::cout << "best cell: " << rebalance_method_name(best.rebalance) << "/"
              << selection_method_name(best.selection) << "/"
              << algorithm_name(best.classifier)
              << " mean F=" << format_double(best.mean_fscore, 4) << "\n";
    return 0;
}

int run_select(const std::string& features_csv, const std::string& method,
               double threshold, const CommonOptions& common) {
    const FeatureMatrix matrix = load_feature_csv(features_csv);
    const SelectionResult result =
        select(matrix, parse_selection_method(method), threshold);
    fs::create_directories(common.out);
    const fs::path file = fs::path(common.out) / "selection.json";
    save_selection_json(result, matrix.columns, file);
    std::cout << result.kept_columns.size() << " of " << matrix.cols()
              << " columns kept -> " << file.string() << "\n";
    return 0;
}

int run_report(const CommonOptions& common) {
    // regenerate the markdown views from JSON already in --out
    const fs::path dir = common.out;
    const fs::path compare_json = dir / "compare.json";
    if (!fs::exists(compare_json)) {
        throw DataError("no compare.json under " + dir.string() +
                        "; run `compare` first");
    }
    std::ifstream in(compare_json);
    json j;
    in >> j;
    std::cout << "datasets in " << compare_json.string() << ":\n";
    for (const auto& entry : j) {
        std::cout << "  " << entry.at("dataset").get<std::string>() << ": F="
                  << format_double(entry.at("cv").at("mean_fscore").get<double>(), 4)
                  << " vs " << entry.at("best_ir").at("model").get<std::string>()
                  << " F@K="
                  << format_double(entry.at("best_ir").at("fscore").get<double>(), 4)
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traceability link classification toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file");

    CommonOptions common;
    FeaturizeOptions fopts;
    PipelineOptions popts;

    std::string dataset_dir;
    std::vector<std::string> dataset_dirs;
    std::string dump_tokens;
    std::string dump_rankings;
    std::string features_csv;
    std::string select_method = "correlation";
    double select_threshold = 1e-6;
    std::vector<std::string> grid_classifiers{"5nn", "logistic", "naive_bayes",
                                              "random_forest", "svm", "vote"};
    std::vector<std::string> grid_rebalancers{"none", "smote"};
    std::vector<std::string> grid_selections{"none", "correlation"};

    auto* ingest = app.add_subcommand("ingest", "load a dataset and print its shape");
    ingest->add_option("dataset", dataset_dir)->required();
    ingest->add_option("--dump-tokens", dump_tokens, "write tokens.jsonl");
    add_common(ingest, common);

    auto* featurize_cmd =
        app.add_subcommand("featurize", "build the feature matrix CSV");
    featurize_cmd->add_option("dataset", dataset_dir)->required();
    featurize_cmd->add_option("--dump-rankings", dump_rankings,
                              "write per-query ranked lists as CSV");
    add_common(featurize_cmd, common);
    add_model_options(featurize_cmd, fopts);

    auto* select_cmd = app.add_subcommand("select", "score and select features");
    select_cmd->add_option("--features", features_csv, "features.csv path")->required();
    select_cmd->add_option("--method", select_method);
    select_cmd->add_option("--threshold", select_threshold);
    add_common(select_cmd, common);

    auto* cv_cmd = app.add_subcommand("cv", "repeated stratified cross-validation");
    cv_cmd->add_option("dataset", dataset_dir)->required();
    add_common(cv_cmd, common);
    add_model_options(cv_cmd, fopts);
    add_pipeline_options(cv_cmd, popts);

    auto* compare_cmd =
        app.add_subcommand("compare", "classifier vs best IR baseline at cut point");
    compare_cmd->add_option("datasets", dataset_dirs)->required();
    add_common(compare_cmd, common);
    add_model_options(compare_cmd, fopts);
    add_pipeline_options(compare_cmd, popts);

    auto* grid_cmd = app.add_subcommand("grid", "configuration grid search");
    grid_cmd->add_option("datasets", dataset_dirs)->required();
    grid_cmd->add_option("--classifiers", grid_classifiers)->delimiter(',');
    grid_cmd->add_option("--rebalancers", grid_rebalancers)->delimiter(',');
    grid_cmd->add_option("--selections", grid_selections)->delimiter(',');
    add_common(grid_cmd, common);
    add_model_options(grid_cmd, fopts);
    add_pipeline_options(grid_cmd, popts);

    auto* report_cmd = app.add_subcommand("report", "summarize existing outputs");
    add_common(report_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) return run_ingest(dataset_dir, common, dump_tokens);
        if (featurize_cmd->parsed()) {
            const TraceDataset ds = load_with_language(dataset_dir, common);
            featurize_cached(ds, dataset_dir, common, fopts);
            if (!dump_rankings.empty()) {
                ModelConfig mc = fopts.model;
                mc.rng_seed = common.seed;
                dump_rankings_csv(ds, mc, dump_rankings);
                std::cout << "rankings dumped to " << dump_rankings << "\n";
            }
            return 0;
        }
        if (select_cmd->parsed()) {
            return run_select(features_csv, select_method, select_threshold, common);
        }
        if (cv_cmd->parsed()) return run_cv_command(dataset_dir, common, fopts, popts);
        if (compare_cmd->parsed()) {
            return run_compare(dataset_dirs, common, fopts, popts);
        }
        if (grid_cmd->parsed()) {
            return run_grid(dataset_dirs, common, fopts, popts, grid_classifiers,
                            grid_rebalancers, grid_selections);
        }
        if (report_cmd->parsed()) return run_report(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
