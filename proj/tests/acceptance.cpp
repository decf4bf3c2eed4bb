// Acceptance suite: exercises every shipped criterion end to end and prints
// one PASS/FAIL line per criterion. Feature matrices and pooled retrieval
// scores are cached under --cache-dir, so repeat runs skip the heavy builds.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "tlr/cache.hpp"
#include "tlr/common.hpp"
#include "tlr/corpus.hpp"
#include "tlr/datagen.hpp"
#include "tlr/eval.hpp"
#include "tlr/stats.hpp"

namespace fs = std::filesystem;
using namespace tlr;

namespace {

constexpr std::uint64_t kSeed = 17;
constexpr int kJobs = 2;

struct Criterion {
    std::string name;
    bool pass = true;
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void require(bool condition, const std::string& what) {
        if (!condition) {
            pass = false;
            failures.push_back(what);
        }
    }
    void note(const std::string& text) { notes.push_back(text); }
};

struct Expected {
    const char* name;
    long long invalid;
    long long valid;
};

// benchmark shape table the corpora must reproduce exactly
constexpr Expected kExpectedShapes[] = {
    {"eanci_cc_uc", 7091, 554},      {"easyclinic_cc_uc", 1317, 93},
    {"easyclinic_id_cc", 871, 69},   {"easyclinic_id_tc", 1177, 83},
    {"easyclinic_id_uc", 574, 26},   {"easyclinic_tc_cc", 2757, 204},
    {"easyclinic_tc_uc", 1827, 63},  {"etour_cc_uc", 6363, 365},
    {"itrust_cc_uc", 1493, 58},      {"modis_highr_lowr", 890, 41},
    {"smos_cc_uc", 5656, 1044},
};

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

Artifact toy(const std::string& id, std::vector<std::string> tokens, Side side) {
    Artifact a;
    a.id = id;
    a.side = side;
    a.tokens = std::move(tokens);
    return a;
}

std::string fmt(double v, int digits = 4) { return format_double(v, digits); }

// ---------------------------------------------------------------------------
// criterion 1: dataset fidelity
// ---------------------------------------------------------------------------

void criterion_dataset_fidelity(Criterion& c, const fs::path& repo,
                                std::map<std::string, TraceDataset>& datasets) {
    long long total_candidates = 0, total_valid = 0;
    for (const auto& expected : kExpectedShapes) {
        const fs::path dir = repo / "datasets" / expected.name;
        const Language lang = dataset_language_hint(dir, Language::english);
        const Preprocessor pre(lang, repo / "data");
        TraceDataset ds = load_dataset(dir, pre);
        c.require(static_cast<long long>(ds.invalid_count()) == expected.invalid &&
                      static_cast<long long>(ds.valid_count()) == expected.valid,
                  std::string(expected.name) + ": got " +
                      std::to_string(ds.invalid_count()) + "/" +
                      std::to_string(ds.valid_count()) + ", expected " +
                      std::to_string(expected.invalid) + "/" +
                      std::to_string(expected.valid));
        total_candidates += static_cast<long long>(ds.candidate_count());
        total_valid += static_cast<long long>(ds.valid_count());
        datasets.emplace(expected.name, std::move(ds));
    }
    c.require(total_candidates == 32616,
              "total candidates " + std::to_string(total_candidates) + " != 32616");
    c.require(total_valid == 2600,
              "total valid " + std::to_string(total_valid) + " != 2600");
    const double ratio = 100.0 * static_cast<double>(total_valid) /
                         static_cast<double>(total_candidates);
    c.require(std::fabs(ratio - 7.97) < 0.005, "valid ratio " + fmt(ratio) + "% != 7.97%");
    c.note("32,616 candidates, 2,600 valid (7.97%)");
}

// ---------------------------------------------------------------------------
// criterion 6: property suites (no dataset required)
// ---------------------------------------------------------------------------

void criterion_properties(Criterion& c, const fs::path& repo) {
    auto close = [](double a, double b, double tol) { return std::fabs(a - b) <= tol; };

    // hand-derived retrieval values
    {
        const std::vector<Artifact> docs{toy("d1", {"x", "y"}, Side::target),
                                         toy("d2", {"y", "z"}, Side::target),
                                         toy("d3", {"x", "z", "w"}, Side::target)};
        const TermIndex index = build_index(docs);
        c.require(close(vsm_similarity(index, 0, 1), 0.5, 1e-9),
                  "cosine(weights (1,1,0),(0,1,1)) != 0.5");
        c.require(close(vsm_similarity(index, 0, 1), vsm_similarity(index, 1, 0), 0.0),
                  "vsm similarity not symmetric");
    }
    c.require(close(hellinger_similarity(std::vector<double>{0.5, 0.5},
                                         std::vector<double>{1.0, 0.0}),
                    0.4588, 1e-3),
              "hellinger (0.5,0.5) vs (1,0) != 0.4588");
    {
        const std::vector<Artifact> docs{toy("d1", {"a"}, Side::target),
                                         toy("d2", {"a", "b"}, Side::target)};
        const TermIndex index = build_index(docs);
        c.require(close(js_similarity(index, 0, 1), 0.6887, 1e-3),
                  "js (1,0) vs (0.5,0.5) != 0.6887");
    }
    {
        const std::vector<Artifact> docs{toy("d1", {"a", "a", "b"}, Side::target),
                                         toy("d2", {"b"}, Side::target)};
        const TermIndex index = build_index(docs);
        ModelConfig config;
        const IndexedQuery q = make_query(index, std::vector<std::string>{"a"});
        c.require(close(bm25_score(index, q, doc_view(index, 0), config), 0.8356, 1e-3),
                  "bm25 hand value != 0.8356");
        ModelConfig lm;
        lm.dirichlet_mu = 2.0;
        lm.jm_lambda = 0.5;
        c.require(close(lm_score(index, q, doc_view(index, 0), LmKind::dirichlet, lm),
                        std::log(0.6), 1e-9),
                  "dirichlet hand value != ln 0.6");
        c.require(close(lm_score(index, q, doc_view(index, 0), LmKind::jelinek_mercer, lm),
                        std::log(7.0 / 12.0), 1e-9),
                  "jelinek-mercer hand value != ln 0.58333");
    }

    // SMOTE geometry and exact class-count targets
    {
        Table t;
        t.cols = 2;
        Rng rng(5);
        for (int i = 0; i < 574; ++i) {
            const double row[2] = {rng.uniform() * 0.2, rng.uniform() * 0.2};
            t.push_row(row, 0);
        }
        for (int i = 0; i < 26; ++i) {
            const double row[2] = {0.8 + rng.uniform() * 0.2, 0.8 + rng.uniform() * 0.2};
            t.push_row(row, 1);
        }
        const Table full = smote(t, 574, 5, 99);
        std::size_t pos = 0;
        for (const auto l : full.labels) pos += l;
        c.require(pos == 574, "full SMOTE: minority " + std::to_string(pos) + " != 574");
        // convex combination: synthetic coordinates inside the minority box
        bool inside = true;
        for (std::size_t r = t.rows(); r < full.rows(); ++r) {
            for (int col = 0; col < 2; ++col) {
                inside = inside && full.row(r)[col] >= 0.8 - 1e-12 &&
                         full.row(r)[col] <= 1.0 + 1e-12;
            }
        }
        c.require(inside, "SMOTE synthetics escape the minority bounding box");
        const Table half = fifty_fifty(t, 5, 23);
        std::size_t hp = 0, hn = 0;
        for (const auto l : half.labels) (l ? hp : hn)++;
        c.require(hp == 300 && hn == 300,
                  "5050 on 26/574: got " + std::to_string(hp) + "/" + std::to_string(hn) +
                      ", expected 300/300");
    }

    // stratified folds: partition and positive balance
    {
        std::vector<std::uint8_t> labels(600, 0);
        for (int i = 0; i < 26; ++i) labels[i * 23] = 1;
        const auto folds = stratified_folds(labels, 10, 42);
        std::vector<bool> seen(labels.size(), false);
        bool balanced = true, disjoint = true;
        std::size_t covered = 0;
        for (const auto& fold : folds) {
            int pos = 0;
            for (const auto r : fold) {
                if (seen[r]) disjoint = false;
                seen[r] = true;
                ++covered;
                pos += labels[r];
            }
            balanced = balanced && pos >= 2 && pos <= 3;
        }
        c.require(disjoint && covered == labels.size(), "folds are not a partition");
        c.require(balanced, "fold positive counts drift beyond +-1");
    }

    // statistics oracles
    {
        const auto mw = mann_whitney_u({1, 2, 3}, {10, 11, 12});
        c.require(mw.exact && close(mw.p, 0.1, 1e-12), "Mann-Whitney exact p != 0.1");
        c.require(close(cliffs_delta({1, 3}, {2, 4}), -0.5, 1e-12),
                  "Cliff's delta != -0.5");
        const auto holm = holm_bonferroni({0.01, 0.04});
        c.require(close(holm[0], 0.02, 1e-12) && close(holm[1], 0.04, 1e-12),
                  "Holm [0.01,0.04] != [0.02,0.04]");
        // t test against numerical integration (Simpson)
        auto t_pdf = [](double x, double nu) {
            const double k = std::exp(std::lgamma((nu + 1.0) / 2.0) -
                                      std::lgamma(nu / 2.0)) /
                             std::sqrt(nu * M_PI);
            return k * std::pow(1.0 + x * x / nu, -(nu + 1.0) / 2.0);
        };
        const double t0 = 3.872983, nu = 3.0;
        const int steps = 100000;
        const double hi = t0 + 80.0, h = (hi - t0) / steps;
        double integral = t_pdf(t0, nu) + t_pdf(hi, nu);
        for (int i = 1; i < steps; ++i) integral += t_pdf(t0 + i * h, nu) * (i % 2 ? 4 : 2);
        integral *= h / 3.0;
        c.require(close(one_sample_t({1, 2, 3, 4}, 0.0), 2.0 * integral, 1e-4),
                  "one-sample t p-value disagrees with numerical integration");
    }

    // feature schema counts
    c.require(FeatureSchema::column_names().size() == 131 &&
                  FeatureSchema::kIrCount == 14 && FeatureSchema::kPreQqCount == 42 &&
                  FeatureSchema::kPostQqCount == 70 && FeatureSchema::kDocStatCount == 5,
              "feature family counts are not 14/42/70/5 = 131");

    // selection scorers against brute force
    {
        const std::vector<double> column{0, 0, 0, 0, 1, 1, 1, 1};
        const std::vector<std::uint8_t> labels{0, 0, 0, 0, 1, 1, 1, 1};
        c.require(close(feature_score(SelectionMethod::info_gain, column, labels), 1.0,
                        1e-12),
                  "info gain of a perfect binary feature != 1 bit");
        c.require(close(feature_score(SelectionMethod::symmetrical, column, labels), 1.0,
                        1e-12),
                  "symmetrical uncertainty of a perfect feature != 1");

        // exhaustive CFS search on 5 features
        FeatureMatrix m;
        m.columns = {"a", "b", "c", "d", "e"};
        Rng rng(9);
        for (int i = 0; i < 60; ++i) {
            const int y = static_cast<int>(rng.below(2));
            m.values.push_back(y ? 0.8 + 0.2 * rng.uniform() : 0.2 * rng.uniform());
            m.values.push_back(0.3 * rng.uniform() + 0.5 * y);
            m.values.push_back(rng.uniform() * 0.7 + 0.3 * y);
            m.values.push_back(rng.uniform());
            m.values.push_back(rng.uniform());
            m.labels.push_back(static_cast<std::uint8_t>(y));
        }
        // oracle: enumerate all 31 subsets with an independent SU implementation
        std::vector<std::vector<int>> binned(5);
        std::vector<double> col(m.rows());
        for (int f = 0; f < 5; ++f) {
            for (std::size_t r = 0; r < m.rows(); ++r) col[r] = m.at(r, f);
            binned[f] = discretize(col);
        }
        auto entropy = [](const std::map<int, int>& counts, int n) {
            double h = 0.0;
            for (const auto& [_, cnt] : counts) {
                if (cnt == 0) continue;
                const double p = static_cast<double>(cnt) / n;
                h -= p * std::log2(p);
            }
            return h;
        };
        auto su = [&](const std::vector<int>& a, const std::vector<int>& b) {
            std::map<int, int> ca, cb;
            std::map<std::pair<int, int>, int> cab;
            for (std::size_t i = 0; i < a.size(); ++i) {
                ++ca[a[i]];
                ++cb[b[i]];
                ++cab[{a[i], b[i]}];
            }
            const int n = static_cast<int>(a.size());
            double hab = 0.0;
            for (const auto& [_, cnt] : cab) {
                const double p = static_cast<double>(cnt) / n;
                hab -= p * std::log2(p);
            }
            const double ha = entropy(ca, n), hb = entropy(cb, n);
            return ha + hb > 0 ? 2.0 * (ha + hb - hab) / (ha + hb) : 0.0;
        };
        std::vector<int> label_bins(m.rows());
        for (std::size_t r = 0; r < m.rows(); ++r) label_bins[r] = m.labels[r];
        std::vector<double> class_corr(5);
        std::vector<std::vector<double>> feat_corr(5, std::vector<double>(5, 1.0));
        for (int i = 0; i < 5; ++i) {
            class_corr[i] = su(binned[i], label_bins);
            for (int j = i + 1; j < 5; ++j) {
                feat_corr[i][j] = feat_corr[j][i] = su(binned[i], binned[j]);
            }
        }
        double best_merit = -1.0;
        std::vector<int> best_subset;
        for (int mask = 1; mask < 32; ++mask) {
            std::vector<int> subset;
            for (int f = 0; f < 5; ++f) {
                if (mask & (1 << f)) subset.push_back(f);
            }
            const double merit = cfs_merit(class_corr, feat_corr, subset);
            if (merit > best_merit) {
                best_merit = merit;
                best_subset = subset;
            }
        }
        c.require(cfs_subset(m) == best_subset,
                  "CFS best-first disagrees with the exhaustive 2^5 search");
    }

    // end-to-end determinism on a toy dataset, default retrieval config
    {
        TraceDataset ds;
        ds.name = "determinism";
        const Preprocessor pre(Language::english, repo / "data");
        for (int s = 0; s < 6; ++s) {
            ds.sources.push_back(toy("s" + std::to_string(s),
                                     pre.preprocess("alpha common s" + std::to_string(s) +
                                                    " payment gateway order"),
                                     Side::source));
        }
        for (int t = 0; t < 8; ++t) {
            ds.targets.push_back(toy("t" + std::to_string(t),
                                     pre.preprocess("beta common t" + std::to_string(t) +
                                                    " payment order handler"),
                                     Side::target));
        }
        for (int i = 0; i < 6; ++i) {
            ds.valid_links.insert({"s" + std::to_string(i), "t" + std::to_string(i)});
        }
        ModelConfig mc;
        mc.rng_seed = kSeed;
        FeatureOptions fo;
        fo.jobs = kJobs;
        const CorpusModels models_a(ds, mc);
        const CorpusModels models_b(ds, mc);
        const FeatureMatrix fa = featurize(ds, models_a, fo);
        const FeatureMatrix fb = featurize(ds, models_b, fo);
        const fs::path tmp_a = fs::temp_directory_path() / "tlr_accept_a.csv";
        const fs::path tmp_b = fs::temp_directory_path() / "tlr_accept_b.csv";
        save_feature_csv(fa, tmp_a);
        save_feature_csv(fb, tmp_b);
        std::ifstream ia(tmp_a, std::ios::binary), ib(tmp_b, std::ios::binary);
        std::stringstream ba, bb;
        ba << ia.rdbuf();
        bb << ib.rdbuf();
        c.require(ba.str() == bb.str(), "featurize is not byte-identical across runs");
        fs::remove(tmp_a);
        fs::remove(tmp_b);

        PipelineConfig pc;
        pc.trials = 3;
        pc.folds = 3;
        pc.seed = kSeed;
        pc.jobs = kJobs;
        pc.rebalance = RebalanceMethod::none;
        pc.selection = SelectionMethod::none;
        pc.classifier = Algorithm::knn5;
        const CvReport ra = run_cv(fa, pc, ds.name);
        const CvReport rb = run_cv(fb, pc, ds.name);
        std::ostringstream ja, jb;
        ja.precision(17);
        jb.precision(17);
        for (const auto& t : ra.trial_results) {
            ja << t.confusion.tp << ',' << t.confusion.fp << ',' << t.confusion.tn
               << ',' << t.confusion.fn << ';';
        }
        for (const auto& t : rb.trial_results) {
            jb << t.confusion.tp << ',' << t.confusion.fp << ',' << t.confusion.tn
               << ',' << t.confusion.fn << ';';
        }
        c.require(ja.str() == jb.str(), "run_cv is not identical across runs");
    }
    c.note("retrieval, rebalancing, fold, statistics and determinism properties hold");
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    std::cout.setf(std::ios::unitbuf);  // stream progress when redirected
    fs::path cache_dir = "acceptance_cache";
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::strcmp(argv[i], "--cache-dir") == 0) cache_dir = argv[i + 1];
    }
    const fs::path repo = TLR_REPO_DIR;
    std::vector<Criterion> criteria;

    // ---- criterion 1
    const auto t1 = std::chrono::steady_clock::now();
    Criterion c1("criterion 1: dataset shapes reproduce the benchmark table exactly");
    std::map<std::string, TraceDataset> datasets;
    try {
        criterion_dataset_fidelity(c1, repo, datasets);
    } catch (const std::exception& e) {
        c1.require(false, e.what());
    }
    c1.note("elapsed " + fmt(elapsed_seconds(t1), 3) + "s");
    criteria.push_back(c1);

    // ---- criterion 6 (no dataset required; run early for fast feedback)
    const auto t6 = std::chrono::steady_clock::now();
    Criterion c6("criterion 6: property suites and hand-derived oracles");
    try {
        criterion_properties(c6, repo);
    } catch (const std::exception& e) {
        c6.require(false, e.what());
    }
    c6.note("elapsed " + fmt(elapsed_seconds(t6), 3) + "s");
    criteria.push_back(c6);

    // ---- heavy shared state: features + pooled scores + 10-trial CV
    ModelConfig model_config;
    model_config.rng_seed = kSeed;
    FeatureOptions feature_options;
    feature_options.jobs = kJobs;

    PipelineConfig cv_config;  // the shipped default: correlation + SMOTE + RF
    cv_config.trials = 10;
    cv_config.folds = 10;
    cv_config.seed = kSeed;
    cv_config.jobs = kJobs;

    struct PerDataset {
        CvReport cv10;
        double mean_f5 = 0.0;       // first-5-trial view (the reduced protocol)
        double mean_pred5 = 0.0;
        std::vector<std::uint8_t> labels;
        std::vector<std::vector<double>> pooled_scores;
    };
    std::map<std::string, PerDataset> results;

    Criterion c2("criterion 2: default configuration reaches the reference F levels");
    Criterion c3("criterion 3: classifier beats the best IR baseline on >= 9 of 11");
    Criterion c5("criterion 5: VSM baseline on easyclinic_cc_uc near the reference");
    try {
        for (const auto& expected : kExpectedShapes) {
            const auto t_ds = std::chrono::steady_clock::now();
            const TraceDataset& ds = datasets.at(expected.name);
            DatasetArtifacts artifacts =
                load_or_build_artifacts(ds, model_config, feature_options, cache_dir);
            PerDataset& r = results[expected.name];
            r.labels = artifacts.features.labels;
            r.pooled_scores = std::move(artifacts.pooled_scores);
            r.cv10 = run_cv(artifacts.features, cv_config, ds.name);
            double f5 = 0.0, pred5 = 0.0;
            for (int t = 0; t < 5; ++t) {
                f5 += r.cv10.trial_results[t].scores.fscore;
                pred5 += static_cast<double>(
                    r.cv10.trial_results[t].confusion.predicted_positives());
            }
            r.mean_f5 = f5 / 5.0;
            r.mean_pred5 = pred5 / 5.0;
            std::cout << "[setup] " << ds.name << ": F(5 trials)=" << fmt(r.mean_f5)
                      << " F(10 trials)=" << fmt(r.cv10.mean_fscore)
                      << (artifacts.from_cache ? " [features cached]" : "")
                      << " elapsed " << fmt(elapsed_seconds(t_ds), 3) << "s\n";
        }

        // criterion 2: (a) TC-CC, (b) ID-TC, (c) macro average over all datasets
        const double f_tc_cc = results.at("easyclinic_tc_cc").mean_f5;
        const double f_id_tc = results.at("easyclinic_id_tc").mean_f5;
        double macro = 0.0;
        for (const auto& [_, r] : results) macro += r.mean_f5;
        macro /= static_cast<double>(results.size());
        c2.require(f_tc_cc >= 0.90,
                   "easyclinic_tc_cc mean F " + fmt(f_tc_cc) + " < 0.90");
        c2.require(f_id_tc >= 0.85,
                   "easyclinic_id_tc mean F " + fmt(f_id_tc) + " < 0.85");
        c2.require(macro >= 0.65, "macro-average F " + fmt(macro) + " < 0.65");
        c2.note("TC-CC F=" + fmt(f_tc_cc) + ", ID-TC F=" + fmt(f_id_tc) +
                ", macro F=" + fmt(macro) + " (5 trials x 10 folds)");

        // criterion 3: significant wins over the best IR baseline at 10 trials
        int wins = 0;
        std::string detail;
        for (const auto& expected : kExpectedShapes) {
            const PerDataset& r = results.at(expected.name);
            const CompareReport report = compare_vs_ir_scores(
                expected.name, r.pooled_scores, r.labels, r.cv10, 0.01);
            const bool win = report.fscore.significant_win;
            wins += win ? 1 : 0;
            detail += std::string(win ? "+" : "-");
            std::cout << "[rq2] " << expected.name
                      << ": classifier F=" << fmt(report.cv.mean_fscore) << " vs "
                      << ir_model_name(report.ir.model)
                      << " F@K=" << fmt(report.ir.scores.fscore)
                      << " adjusted p=" << fmt(report.fscore.p_adjusted, 3)
                      << (win ? "  WIN" : "  no significant win") << "\n";
        }
        c3.require(wins >= 9, "significant wins " + std::to_string(wins) + "/11 < 9");
        c3.note(std::to_string(wins) + "/11 significant wins (" + detail + ")");

        // criterion 5: VSM on easyclinic_cc_uc at the classifier's cut point
        const PerDataset& cc = results.at("easyclinic_cc_uc");
        const long long k =
            std::max<long long>(1, std::llround(cc.mean_pred5));
        const IrBaselineResult vsm = ir_baseline_from_scores(
            cc.pooled_scores[0], cc.labels, IrModel::vsm, k);
        c5.require(std::fabs(vsm.scores.precision - 0.6154) <= 0.10,
                   "VSM P@K " + fmt(vsm.scores.precision) + " outside 0.6154 +- 0.10");
        c5.require(std::fabs(vsm.scores.recall - 0.6882) <= 0.10,
                   "VSM R@K " + fmt(vsm.scores.recall) + " outside 0.6882 +- 0.10");
        c5.require(std::fabs(vsm.scores.fscore - 0.6497) <= 0.10,
                   "VSM F@K " + fmt(vsm.scores.fscore) + " outside 0.6497 +- 0.10");
        c5.note("K=" + std::to_string(k) + ": P=" + fmt(vsm.scores.precision) +
                " R=" + fmt(vsm.scores.recall) + " F=" + fmt(vsm.scores.fscore));
    } catch (const std::exception& e) {
        c2.require(false, e.what());
        c3.require(false, std::string("not evaluated: ") + e.what());
        c5.require(false, std::string("not evaluated: ") + e.what());
    }
    criteria.push_back(c2);
    criteria.push_back(c3);
    criteria.push_back(c5);

    // ---- criterion 4: reduced grid, random forest on top everywhere tested
    Criterion c4("criterion 4: random forest tops the reduced grid on every dataset");
    try {
        const std::vector<std::string> grid_datasets{
            "easyclinic_id_uc", "modis_highr_lowr", "easyclinic_id_cc"};
        const std::vector<Algorithm> algs{Algorithm::knn5,          Algorithm::logistic,
                                          Algorithm::naive_bayes,   Algorithm::random_forest,
                                          Algorithm::svm,           Algorithm::vote};
        for (const auto& name : grid_datasets) {
            const auto t_grid = std::chrono::steady_clock::now();
            const TraceDataset& ds = datasets.at(name);
            const DatasetArtifacts artifacts =
                load_or_build_artifacts(ds, model_config, feature_options, cache_dir);
            double best_f = -1.0;
            Algorithm best_alg = Algorithm::knn5;
            std::string best_cell;
            for (const RebalanceMethod reb :
                 {RebalanceMethod::none, RebalanceMethod::smote}) {
                for (const SelectionMethod sel :
                     {SelectionMethod::none, SelectionMethod::correlation}) {
                    for (const Algorithm alg : algs) {
                        PipelineConfig config = cv_config;
                        config.trials = 5;
                        config.rebalance = reb;
                        config.selection = sel;
                        config.classifier = alg;
                        const CvReport report =
                            run_cv(artifacts.features, config, ds.name);
                        if (report.mean_fscore > best_f) {
                            best_f = report.mean_fscore;
                            best_alg = alg;
                            best_cell = rebalance_method_name(reb) + "/" +
                                        selection_method_name(sel) + "/" +
                                        algorithm_name(alg);
                        }
                    }
                }
            }
            c4.require(best_alg == Algorithm::random_forest,
                       name + ": best cell is " + best_cell + " (F=" + fmt(best_f) +
                           "), not random forest");
            std::cout << "[grid] " << name << ": best " << best_cell
                      << " F=" << fmt(best_f) << " elapsed "
                      << fmt(elapsed_seconds(t_grid), 3) << "s\n";
        }
        c4.note("grid: 6 classifiers x {none,smote} x {none,correlation}, 5 trials");
    } catch (const std::exception& e) {
        c4.require(false, e.what());
    }
    criteria.push_back(c4);

    // ---- summary, ordered by criterion number
    std::sort(criteria.begin(), criteria.end(),
              [](const Criterion& a, const Criterion& b) { return a.name < b.name; });
    bool all_pass = true;
    std::cout << "\n=== acceptance summary ===\n";
    for (const auto& c : criteria) {
        std::cout << (c.pass ? "PASS  " : "FAIL  ") << c.name;
        for (const auto& n : c.notes) std::cout << "\n      " << n;
        for (const auto& f : c.failures) std::cout << "\n      ! " << f;
        std::cout << "\n";
        all_pass = all_pass && c.pass;
    }
    return all_pass ? 0 : 1;
}
