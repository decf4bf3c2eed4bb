#include <doctest.h>

#include <cmath>

#include "tlr/common.hpp"
#include "tlr/learn.hpp"

using namespace tlr;

namespace {

Table blobs(std::size_t per_class, std::uint64_t seed) {
    Table t;
    t.cols = 2;
    Rng rng(seed);
    for (std::size_t i = 0; i < per_class; ++i) {
        const double row[2] = {rng.uniform() * 0.5, rng.uniform() * 0.5};
        t.push_row(row, 0);
    }
    for (std::size_t i = 0; i < per_class; ++i) {
        const double row[2] = {5.0 + rng.uniform() * 0.5, 5.0 + rng.uniform() * 0.5};
        t.push_row(row, 1);
    }
    return t;
}

const std::vector<std::string> kSchema2{"f0", "f1"};

double training_accuracy(const TrainedModel& model, const Table& t) {
    std::size_t correct = 0;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const auto p = model.predict(std::span<const double>(t.row(r), t.cols));
        if (p.label == (t.labels[r] != 0)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(t.rows());
}

Table xor_table() {
    Table t;
    t.cols = 2;
    const double rows[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    t.push_row(rows[0], 0);
    t.push_row(rows[1], 0);
    t.push_row(rows[2], 1);
    t.push_row(rows[3], 1);
    return t;
}

}  // namespace

TEST_CASE("well-separated blobs: every algorithm reaches training accuracy 1") {
    const Table data = blobs(20, 31);
    Hyperparams hp;
    for (const Algorithm alg : kAllAlgorithms) {
        const auto model = train(alg, data, kSchema2, hp, 7);
        CHECK(training_accuracy(*model, data) == doctest::Approx(1.0));
        // p_valid within [0,1] and consistent with the threshold
        for (std::size_t r = 0; r < data.rows(); ++r) {
            const auto p = model->predict(std::span<const double>(data.row(r), 2));
            CHECK(p.p_valid >= 0.0);
            CHECK(p.p_valid <= 1.0);
            CHECK(p.label == (p.p_valid >= 0.5));
        }
    }
}

TEST_CASE("random forest: determinism under a fixed seed") {
    const Table data = blobs(15, 5);
    Hyperparams hp;
    hp.rf_trees = 25;
    const auto a = train(Algorithm::random_forest, data, kSchema2, hp, 99);
    const auto b = train(Algorithm::random_forest, data, kSchema2, hp, 99);
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        const double probe[2] = {rng.uniform() * 6.0, rng.uniform() * 6.0};
        CHECK(a->predict(std::span<const double>(probe, 2)).p_valid ==
              b->predict(std::span<const double>(probe, 2)).p_valid);
    }
}

TEST_CASE("xor: logistic cannot separate, the forest can") {
    const Table data = xor_table();
    Hyperparams hp;
    const auto logistic = train(Algorithm::logistic, data, kSchema2, hp, 3);
    CHECK(training_accuracy(*logistic, data) <= 0.75);
    const auto forest = train(Algorithm::random_forest, data, kSchema2, hp, 3);
    CHECK(training_accuracy(*forest, data) == doctest::Approx(1.0));
}

TEST_CASE("knn: probability is the valid fraction of the 5 neighbours") {
    Table t;
    t.cols = 1;
    for (int i = 0; i < 5; ++i) {
        const double v = 1.0 + 0.01 * i;
        t.push_row(&v, 1);
    }
    const double far = 50.0;
    t.push_row(&far, 0);
    Hyperparams hp;
    const auto model = train(Algorithm::knn5, t, {"f0"}, hp, 1);
    const double probe = 1.0;
    const auto p = model->predict(std::span<const double>(&probe, 1));
    CHECK(p.label);
    CHECK(p.p_valid == doctest::Approx(1.0));
}

TEST_CASE("vote: probability equals the mean of its five members") {
    const Table data = blobs(12, 77);
    Hyperparams hp;
    hp.rf_trees = 20;
    const std::uint64_t seed = 41;
    const auto vote = train(Algorithm::vote, data, kSchema2, hp, seed);

    const Algorithm bases[] = {Algorithm::knn5, Algorithm::naive_bayes,
                               Algorithm::logistic, Algorithm::random_forest,
                               Algorithm::svm};
    std::vector<std::unique_ptr<TrainedModel>> members;
    for (std::size_t i = 0; i < 5; ++i) {
        members.push_back(train(bases[i], data, kSchema2, hp, derive_seed(seed, i + 1)));
    }
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        const double probe[2] = {rng.uniform() * 6.0, rng.uniform() * 6.0};
        double mean = 0.0;
        for (const auto& m : members) {
            mean += m->predict(std::span<const double>(probe, 2)).p_valid;
        }
        mean /= 5.0;
        CHECK(vote->predict(std::span<const double>(probe, 2)).p_valid ==
              doctest::Approx(mean).epsilon(1e-12));
    }
    // the documented arithmetic: (0.9+0.9+0.9+0.2+0.2)/5 = 0.62 -> valid
    CHECK((0.9 + 0.9 + 0.9 + 0.2 + 0.2) / 5.0 == doctest::Approx(0.62));
}

TEST_CASE("logistic with all-zero weights predicts exactly 0.5") {
    const std::string payload = R"({
        "version": 1, "algorithm": "logistic", "schema": ["f0", "f1"], "seed": 0,
        "params": {"weights": [0.0, 0.0, 0.0]}
    })";
    const auto model = deserialize_model(payload);
    const double probe[2] = {3.0, -2.0};
    CHECK(model->predict(std::span<const double>(probe, 2)).p_valid ==
          doctest::Approx(0.5));
}

TEST_CASE("serialization round trips preserve predictions") {
    const Table data = blobs(10, 13);
    Hyperparams hp;
    hp.rf_trees = 10;
    Rng rng(21);
    for (const Algorithm alg : kAllAlgorithms) {
        const auto model = train(alg, data, kSchema2, hp, 5);
        const auto restored = deserialize_model(serialize_model(*model));
        CHECK(restored->algorithm() == alg);
        CHECK(restored->schema() == model->schema());
        for (int i = 0; i < 25; ++i) {
            const double probe[2] = {rng.uniform() * 6.0, rng.uniform() * 6.0};
            CHECK(restored->predict(std::span<const double>(probe, 2)).p_valid ==
                  model->predict(std::span<const double>(probe, 2)).p_valid);
        }
    }
}

TEST_CASE("logistic weights survive the round trip bit for bit") {
    const Table data = blobs(10, 19);
    Hyperparams hp;
    const auto model = train(Algorithm::logistic, data, kSchema2, hp, 5);
    const auto payload = serialize_model(*model);
    const auto restored = deserialize_model(payload);
    // identical probabilities on training rows implies identical weights here
    for (std::size_t r = 0; r < data.rows(); ++r) {
        CHECK(model->predict(std::span<const double>(data.row(r), 2)).p_valid ==
              restored->predict(std::span<const double>(data.row(r), 2)).p_valid);
    }
}

TEST_CASE("corrupt payloads and version mismatches are rejected") {
    const Table data = blobs(6, 2);
    Hyperparams hp;
    hp.rf_trees = 5;
    const auto model = train(Algorithm::random_forest, data, kSchema2, hp, 5);
    const std::string payload = serialize_model(*model);

    CHECK_THROWS_AS(deserialize_model(payload.substr(0, payload.size() / 2)), DataError);
    CHECK_THROWS_AS(deserialize_model("not json at all"), DataError);

    std::string wrong_version = payload;
    const auto at = wrong_version.find("\"version\":1");
    REQUIRE(at != std::string::npos);
    wrong_version.replace(at, 11, "\"version\":9");
    CHECK_THROWS_AS(deserialize_model(wrong_version), DataError);
}

TEST_CASE("schema checks") {
    const Table data = blobs(8, 44);
    Hyperparams hp;
    const auto model = train(Algorithm::naive_bayes, data, kSchema2, hp, 5);
    const double probe[2] = {0.1, 0.2};
    CHECK_NOTHROW(model->predict_checked(kSchema2, std::span<const double>(probe, 2)));
    CHECK_THROWS_AS(
        model->predict_checked({"other", "columns"}, std::span<const double>(probe, 2)),
        DataError);
}

TEST_CASE("naive bayes and logistic ignore a constant-zero column") {
    const Table data = blobs(12, 61);
    Table padded = data;
    padded.cols = 3;
    padded.values.clear();
    for (std::size_t r = 0; r < data.rows(); ++r) {
        padded.values.push_back(data.row(r)[0]);
        padded.values.push_back(data.row(r)[1]);
        padded.values.push_back(0.0);
    }
    Hyperparams hp;
    const std::vector<std::string> schema3{"f0", "f1", "zero"};
    for (const Algorithm alg : {Algorithm::naive_bayes, Algorithm::logistic}) {
        const auto base = train(alg, data, kSchema2, hp, 5);
        const auto wide = train(alg, padded, schema3, hp, 5);
        Rng rng(6);
        for (int i = 0; i < 20; ++i) {
            const double probe[3] = {rng.uniform() * 6.0, rng.uniform() * 6.0, 0.0};
            CHECK(wide->predict(std::span<const double>(probe, 3)).p_valid ==
                  doctest::Approx(
                      base->predict(std::span<const double>(probe, 2)).p_valid)
                      .epsilon(1e-9));
        }
    }
}

TEST_CASE("single-class training data") {
    Table t;
    t.cols = 1;
    for (int i = 0; i < 6; ++i) {
        const double v = i;
        t.push_row(&v, 1);
    }
    Hyperparams hp;
    hp.rf_trees = 5;
    CHECK_THROWS_AS(train(Algorithm::logistic, t, {"f0"}, hp, 1), DataError);
    CHECK_THROWS_AS(train(Algorithm::svm, t, {"f0"}, hp, 1), DataError);
    // constant predictors are fine for the rest
    for (const Algorithm alg :
         {Algorithm::knn5, Algorithm::naive_bayes, Algorithm::random_forest}) {
        const auto model = train(alg, t, {"f0"}, hp, 1);
        const double probe = 2.5;
        CHECK(model->predict(std::span<const double>(&probe, 1)).label);
    }
}

TEST_CASE("knn and naive bayes are invariant to training-row order") {
    const Table data = blobs(10, 83);
    Table reversed;
    reversed.cols = data.cols;
    for (std::size_t r = data.rows(); r-- > 0;) {
        reversed.push_row(data.row(r), data.labels[r]);
    }
    Hyperparams hp;
    for (const Algorithm alg : {Algorithm::knn5, Algorithm::naive_bayes}) {
        const auto a = train(alg, data, kSchema2, hp, 5);
        const auto b = train(alg, reversed, kSchema2, hp, 5);
        Rng rng(9);
        for (int i = 0; i < 20; ++i) {
            const double probe[2] = {rng.uniform() * 6.0, rng.uniform() * 6.0};
            CHECK(a->predict(std::span<const double>(probe, 2)).p_valid ==
                  doctest::Approx(
                      b->predict(std::span<const double>(probe, 2)).p_valid)
                      .epsilon(1e-12));
        }
    }
}
