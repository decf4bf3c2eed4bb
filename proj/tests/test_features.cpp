#include <doctest.h>

#include <cmath>
#include <set>

#include "tlr/features.hpp"

using namespace tlr;

namespace {

Artifact make_artifact(const std::string& id, std::vector<std::string> tokens,
                       Side side = Side::target) {
    Artifact a;
    a.id = id;
    a.side = side;
    a.tokens = std::move(tokens);
    return a;
}

ModelConfig small_model_config() {
    ModelConfig c;
    c.lda_topics = 4;
    c.lda_iterations = 30;
    c.rng_seed = 11;
    return c;
}

}  // namespace

TEST_CASE("feature schema: 14 + 42 + 70 + 5 = 131 named columns") {
    const auto& names = FeatureSchema::column_names();
    CHECK(names.size() == 131);
    CHECK(FeatureSchema::kIrCount == 14);
    CHECK(FeatureSchema::kPreQqCount == 42);
    CHECK(FeatureSchema::kPostQqCount == 70);
    CHECK(FeatureSchema::kDocStatCount == 5);

    int ir = 0, pre = 0, post = 0, doc = 0;
    int fwd = 0, rev = 0;
    for (const auto& n : names) {
        if (n.rfind("ir.", 0) == 0) ++ir;
        else if (n.rfind("qq.pre.", 0) == 0) ++pre;
        else if (n.rfind("qq.post.", 0) == 0) ++post;
        else if (n.rfind("doc.", 0) == 0) ++doc;
        if (n.size() > 4 && n.substr(n.size() - 4) == ".fwd") ++fwd;
        if (n.size() > 4 && n.substr(n.size() - 4) == ".rev") ++rev;
    }
    CHECK(ir == 14);
    CHECK(pre == 42);
    CHECK(post == 70);
    CHECK(doc == 5);
    // direction coverage: everything except doc stats exists in both directions
    CHECK(fwd == (131 - 5) / 2);
    CHECK(rev == (131 - 5) / 2);
    // no duplicates
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == 131);
}

TEST_CASE("doc stats") {
    const auto s = make_artifact("s", {"a", "b", "c"}, Side::source);
    const auto t1 = make_artifact("t1", {"b", "c", "d"});
    const auto stats = doc_stats(s, t1);
    CHECK(stats[0] == 3);  // source unique
    CHECK(stats[1] == 3);
    CHECK(stats[2] == 3);  // source total
    CHECK(stats[3] == 3);
    CHECK(stats[4] == doctest::Approx(0.5));  // |{b,c}| / |{a,b,c,d}|

    CHECK(doc_stats(s, make_artifact("t", {"a", "b", "c", "a"}))[4] ==
          doctest::Approx(1.0));
    CHECK(doc_stats(s, make_artifact("t", {"x", "y"}))[4] == doctest::Approx(0.0));
    CHECK(doc_stats(make_artifact("e1", {}, Side::source),
                    make_artifact("e2", {}))[4] == doctest::Approx(0.0));
}

TEST_CASE("pre-retrieval metrics: single-term and trivial cases") {
    TraceDataset ds;
    ds.name = "toy";
    ds.sources = {make_artifact("s1", {"uniq"}, Side::source),
                  make_artifact("s2", {"common"}, Side::source)};
    for (int i = 0; i < 10; ++i) {
        std::vector<std::string> tokens{"common", "w" + std::to_string(i)};
        if (i == 0) tokens.push_back("uniq");
        ds.targets.push_back(make_artifact("t" + std::to_string(i), tokens));
    }
    const CorpusModels models(ds, small_model_config());

    SUBCASE("term in 1 of 10 docs: avg=max=ln 10, dev 0") {
        const auto metrics = pre_retrieval_qq(models, Side::target, ds.sources[0]);
        CHECK(metrics[0] == doctest::Approx(std::log(10.0)));  // idf_avg
        CHECK(metrics[1] == doctest::Approx(std::log(10.0)));  // idf_max
        CHECK(metrics[2] == doctest::Approx(0.0));             // idf_dev
        CHECK(metrics[20] == doctest::Approx(1.0));            // ql
    }
    SUBCASE("term in every doc: qs = -ln 1 = 0") {
        const auto metrics = pre_retrieval_qq(models, Side::target, ds.sources[1]);
        CHECK(metrics[16] == doctest::Approx(0.0));
    }
    SUBCASE("query with no indexed terms imputes zeros") {
        const auto metrics = pre_retrieval_qq(models, Side::target,
                                              make_artifact("x", {"zzz"}, Side::source));
        for (int i = 0; i < 20; ++i) CHECK(metrics[i] == doctest::Approx(0.0));
        CHECK(metrics[20] == doctest::Approx(1.0));  // ql still counts tokens
    }
}

TEST_CASE("pre-retrieval metrics match a brute-force recomputation") {
    TraceDataset ds;
    ds.name = "toy4";
    ds.sources = {make_artifact("q", {"p", "q"}, Side::source)};
    ds.targets = {make_artifact("A", {"p", "q"}), make_artifact("B", {"p", "r"}),
                  make_artifact("C", {"q", "r", "s"}), make_artifact("D", {"p", "p", "q"})};
    const CorpusModels models(ds, small_model_config());
    const auto metrics = pre_retrieval_qq(models, Side::target, ds.sources[0]);

    // raw counts: N=4, total=10; p: df=3 cf=4; q: df=3 cf=3
    const double n = 4.0, total = 10.0;
    const double idf_p = std::log(n / 3.0), idf_q = std::log(n / 3.0);
    CHECK(metrics[0] == doctest::Approx((idf_p + idf_q) / 2.0));
    CHECK(metrics[1] == doctest::Approx(std::max(idf_p, idf_q)));
    CHECK(metrics[2] == doctest::Approx(0.0));

    const double ictf_p = std::log(total / 4.0), ictf_q = std::log(total / 3.0);
    CHECK(metrics[3] == doctest::Approx((ictf_p + ictf_q) / 2.0));
    CHECK(metrics[4] == doctest::Approx(std::max(ictf_p, ictf_q)));
    CHECK(metrics[5] == doctest::Approx(std::fabs(ictf_p - ictf_q) / 2.0));

    // entropy over docs containing the term, p(d|t) = tf/cf, natural log
    const double ent_p = -(0.25 * std::log(0.25) * 2.0 + 0.5 * std::log(0.5));
    const double ent_q = std::log(3.0);
    CHECK(metrics[6] == doctest::Approx((ent_p + ent_q) / 2.0));
    CHECK(metrics[7] == doctest::Approx(std::max(ent_p, ent_q)));
    CHECK(metrics[8] == doctest::Approx(std::fabs(ent_p - ent_q) / 2.0));

    // population variance of tf*idf across docs containing the term
    const double w1 = idf_p, w2 = idf_p, w3 = 2.0 * idf_p;
    const double mean_w = (w1 + w2 + w3) / 3.0;
    const double var_p = ((w1 - mean_w) * (w1 - mean_w) + (w2 - mean_w) * (w2 - mean_w) +
                          (w3 - mean_w) * (w3 - mean_w)) /
                         3.0;
    CHECK(metrics[9] == doctest::Approx(var_p / 2.0));   // var_avg (var_q = 0)
    CHECK(metrics[10] == doctest::Approx(var_p));        // var_max
    CHECK(metrics[11] == doctest::Approx(var_p));        // var_sum

    const double scq_p = (1.0 + std::log(4.0)) * idf_p;
    const double scq_q = (1.0 + std::log(3.0)) * idf_q;
    CHECK(metrics[12] == doctest::Approx((scq_p + scq_q) / 2.0));
    CHECK(metrics[13] == doctest::Approx(std::max(scq_p, scq_q)));
    CHECK(metrics[14] == doctest::Approx(scq_p + scq_q));

    const double scs =
        0.5 * std::log2(0.5 / 0.4) + 0.5 * std::log2(0.5 / 0.3);
    CHECK(metrics[15] == doctest::Approx(scs).epsilon(1e-9));
    CHECK(metrics[16] == doctest::Approx(0.0));  // qs: every doc covered

    const double pmi = std::log(2.0 * n / (3.0 * 3.0));  // co-occurrence in A and D
    CHECK(metrics[17] == doctest::Approx(pmi));
    CHECK(metrics[18] == doctest::Approx(pmi));

    // coherence: mean pairwise VSM similarity of docs containing each term
    const TermIndex& index = models.index(Side::target);
    auto coherence_of = [&](const std::string& term) {
        std::vector<int> docs;
        const int t = index.term_id(term);
        for (const auto& dc : index.postings[t]) docs.push_back(dc.doc);
        double sum = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            for (std::size_t j = i + 1; j < docs.size(); ++j) {
                sum += vsm_similarity(index, docs[i], docs[j]);
                ++pairs;
            }
        }
        return pairs > 0 ? sum / pairs : 0.0;
    };
    CHECK(metrics[19] ==
          doctest::Approx((coherence_of("p") + coherence_of("q")) / 2.0));
    CHECK(metrics[20] == doctest::Approx(2.0));
}

TEST_CASE("post-retrieval metrics: trivial values") {
    // identical targets: every score equal, so NQC = 0 and WIG = 0
    TraceDataset ds;
    ds.name = "flat";
    ds.sources = {make_artifact("s", {"p", "q"}, Side::source)};
    for (int i = 0; i < 5; ++i) {
        ds.targets.push_back(make_artifact("t" + std::to_string(i), {"p", "q", "x"}));
    }
    const CorpusModels models(ds, small_model_config());
    FeatureOptions options;
    options.result_depth = 3;

    const auto metrics = post_retrieval_qq(models, Side::target, ds.sources[0], 0,
                                           IrModel::vsm, options, 99);
    CHECK(metrics[6] == doctest::Approx(0.0));  // nqc
    CHECK(metrics[5] == doctest::Approx(0.0).epsilon(1e-9));  // wig

    SUBCASE("single-term query: overlap 1.0, first-rank-change 0.0") {
        const auto single = post_retrieval_qq(models, Side::target,
                                              make_artifact("s2", {"p"}, Side::source),
                                              0, IrModel::vsm, options, 99);
        CHECK(single[0] == doctest::Approx(1.0));
        CHECK(single[2] == doctest::Approx(0.0));
    }
}

TEST_CASE("subquery overlap matches exhaustive enumeration on a 5-doc corpus") {
    TraceDataset ds;
    ds.name = "enum";
    ds.sources = {make_artifact("s", {"p", "q"}, Side::source)};
    ds.targets = {make_artifact("t0", {"p", "p", "x"}), make_artifact("t1", {"q", "q", "y"}),
                  make_artifact("t2", {"p", "q"}), make_artifact("t3", {"x", "y", "z"}),
                  make_artifact("t4", {"p", "z"})};
    const CorpusModels models(ds, small_model_config());
    FeatureOptions options;
    options.result_depth = 2;  // eta below corpus size so overlap is informative

    const auto metrics = post_retrieval_qq(models, Side::target, ds.sources[0], 0,
                                           IrModel::vsm, options, 123);

    // brute force: rank all docs for the full query and both subqueries
    const TermIndex& index = models.index(Side::target);
    auto top2 = [&](const std::vector<std::string>& tokens) {
        const IndexedQuery q = make_query(index, tokens);
        std::vector<double> scores(index.num_docs);
        for (int d = 0; d < index.num_docs; ++d) {
            scores[d] = vsm_score(index, q, doc_view(index, d));
        }
        const auto ranked = rank_scores(scores);
        return std::set<int>{ranked[0].doc, ranked[1].doc};
    };
    auto top1 = [&](const std::vector<std::string>& tokens) {
        const IndexedQuery q = make_query(index, tokens);
        std::vector<double> scores(index.num_docs);
        for (int d = 0; d < index.num_docs; ++d) {
            scores[d] = vsm_score(index, q, doc_view(index, d));
        }
        return rank_scores(scores)[0].doc;
    };

    const auto full = top2({"p", "q"});
    double expected_overlap = 0.0;
    int expected_changes = 0;
    // removing "p" leaves {q}; removing "q" leaves {p}
    for (const auto& sub : {std::vector<std::string>{"q"}, std::vector<std::string>{"p"}}) {
        const auto sub_top = top2(sub);
        int shared = 0;
        for (const int d : sub_top) shared += full.count(d);
        expected_overlap += static_cast<double>(shared) / 2.0;
        if (top1(sub) != top1({"p", "q"})) ++expected_changes;
    }
    expected_overlap /= 2.0;

    CHECK(metrics[0] == doctest::Approx(expected_overlap));
    CHECK(metrics[2] == doctest::Approx(expected_changes / 2.0));
}

TEST_CASE("featurize: full pipeline on toy datasets") {
    SUBCASE("rank features follow 1 - (rank-1)/(n-1)") {
        TraceDataset ds;
        ds.name = "ranks";
        ds.sources = {make_artifact("s", {"a", "b", "c", "d"}, Side::source)};
        ds.targets = {make_artifact("t1", {"a", "b", "c", "d"}),
                      make_artifact("t2", {"a", "b", "c", "x2"}),
                      make_artifact("t3", {"a", "b", "x3", "y3"}),
                      make_artifact("t4", {"a", "x4", "y4", "z4"}),
                      make_artifact("t5", {"w5", "x5", "y5", "z5"})};
        ds.valid_links = {{"s", "t1"}};
        const CorpusModels models(ds, small_model_config());
        FeatureOptions options;
        options.include_post_qq = false;
        const FeatureMatrix matrix = featurize(ds, models, options);
        REQUIRE(matrix.rows() == 5);

        // ir.vsm.fwd is column 0; rows are (s,t1)..(s,t5) in target order and
        // vsm ranks follow the shared-term counts: 1,2,3,4,5
        CHECK(matrix.at(0, 0) == doctest::Approx(1.0));
        CHECK(matrix.at(1, 0) == doctest::Approx(0.75));
        CHECK(matrix.at(2, 0) == doctest::Approx(0.5));
        CHECK(matrix.at(3, 0) == doctest::Approx(0.25));
        CHECK(matrix.at(4, 0) == doctest::Approx(0.0));

        // rank-feature consistency: 1.0 iff rank 1 in the ir module's ranking
        const auto ranked = models.rank(IrModel::vsm, Side::target, ds.sources[0], 0);
        CHECK(ranked[0].doc == 0);
    }

    SUBCASE("singleton dataset: raw rank features are 1.0, normalized to 0") {
        TraceDataset ds;
        ds.name = "single";
        ds.sources = {make_artifact("s", {"a", "b"}, Side::source)};
        ds.targets = {make_artifact("t", {"a", "c"})};
        ds.valid_links = {{"s", "t"}};
        const CorpusModels models(ds, small_model_config());
        FeatureOptions options;
        NormalizationBounds bounds;
        const FeatureMatrix matrix = featurize(ds, models, options, &bounds);
        REQUIRE(matrix.rows() == 1);
        REQUIRE(matrix.cols() == 131);
        for (int c = 0; c < FeatureSchema::kIrCount; ++c) {
            CHECK(bounds.min[c] == doctest::Approx(1.0));  // raw rank feature
            CHECK(bounds.max[c] == doctest::Approx(1.0));
            CHECK(matrix.at(0, c) == doctest::Approx(0.0));  // constant -> 0
        }
    }

    SUBCASE("normalization: to [0,1], idempotent") {
        TraceDataset ds;
        ds.name = "norm";
        ds.sources = {make_artifact("s1", {"a", "b"}, Side::source),
                      make_artifact("s2", {"c", "d"}, Side::source)};
        ds.targets = {make_artifact("t1", {"a", "c"}), make_artifact("t2", {"b", "d"}),
                      make_artifact("t3", {"a", "d", "e"})};
        ds.valid_links = {{"s1", "t1"}, {"s2", "t2"}};
        const CorpusModels models(ds, small_model_config());
        FeatureOptions options;
        options.result_depth = 2;
        FeatureMatrix matrix = featurize(ds, models, options);
        REQUIRE(matrix.rows() == 6);

        for (std::size_t c = 0; c < matrix.cols(); ++c) {
            double lo = 1e300, hi = -1e300;
            for (std::size_t r = 0; r < matrix.rows(); ++r) {
                lo = std::min(lo, matrix.at(r, c));
                hi = std::max(hi, matrix.at(r, c));
            }
            CHECK(lo >= 0.0);
            CHECK(hi <= 1.0);
            // non-constant columns span exactly [0,1]
            if (hi > lo) {
                CHECK(lo == doctest::Approx(0.0));
                CHECK(hi == doctest::Approx(1.0));
            }
        }

        FeatureMatrix twice = matrix;
        normalize_columns(twice, compute_bounds(twice));
        for (std::size_t i = 0; i < matrix.values.size(); ++i) {
            CHECK(twice.values[i] == doctest::Approx(matrix.values[i]).epsilon(1e-12));
        }
    }

    SUBCASE("post-QQ off yields 61 columns") {
        CHECK(FeatureSchema::kTotal - FeatureSchema::kPostQqCount == 61);
    }
}

TEST_CASE("feature CSV round trip") {
    TraceDataset ds;
    ds.name = "csv";
    ds.sources = {make_artifact("s", {"a", "b"}, Side::source)};
    ds.targets = {make_artifact("t1", {"a"}), make_artifact("t2", {"b", "c"})};
    ds.valid_links = {{"s", "t1"}};
    const CorpusModels models(ds, small_model_config());
    FeatureOptions options;
    options.result_depth = 2;
    const FeatureMatrix matrix = featurize(ds, models, options);

    const auto tmp = std::filesystem::temp_directory_path() / "tlr_features_test.csv";
    save_feature_csv(matrix, tmp);
    const FeatureMatrix loaded = load_feature_csv(tmp);
    std::filesystem::remove(tmp);

    REQUIRE(loaded.rows() == matrix.rows());
    REQUIRE(loaded.cols() == matrix.cols());
    CHECK(loaded.columns == matrix.columns);
    CHECK(loaded.labels == matrix.labels);
    for (std::size_t i = 0; i < matrix.values.size(); ++i) {
        CHECK(loaded.values[i] == doctest::Approx(matrix.values[i]).epsilon(1e-8));
    }
}
