#include <doctest.h>

#include <algorithm>
#include <set>

#include "tlr/balance.hpp"
#include "tlr/common.hpp"

using namespace tlr;

namespace {

// minority rows cluster near 1.0, majority near 0.0
Table imbalanced_table(std::size_t minority, std::size_t majority, std::size_t cols,
                       std::uint64_t seed) {
    Table t;
    t.cols = cols;
    Rng rng(seed);
    std::vector<double> row(cols);
    for (std::size_t i = 0; i < majority; ++i) {
        for (auto& v : row) v = 0.2 * rng.uniform();
        t.push_row(row.data(), 0);
    }
    for (std::size_t i = 0; i < minority; ++i) {
        for (auto& v : row) v = 0.8 + 0.2 * rng.uniform();
        t.push_row(row.data(), 1);
    }
    return t;
}

std::pair<std::size_t, std::size_t> class_counts(const Table& t) {
    std::size_t pos = 0, neg = 0;
    for (const auto l : t.labels) (l ? pos : neg)++;
    return {pos, neg};
}

}  // namespace

TEST_CASE("smote: boosts the minority to the target, keeps originals") {
    const Table input = imbalanced_table(26, 574, 5, 1);
    const Table output = smote(input, 574, 5, 99);
    const auto [pos, neg] = class_counts(output);
    CHECK(pos == 574);
    CHECK(neg == 574);
    // originals retained as a prefix
    REQUIRE(output.rows() >= input.rows());
    for (std::size_t r = 0; r < input.rows(); ++r) {
        CHECK(output.labels[r] == input.labels[r]);
        for (std::size_t c = 0; c < input.cols; ++c) {
            CHECK(output.row(r)[c] == input.row(r)[c]);
        }
    }
}

TEST_CASE("smote geometry: synthetics interpolate two minority rows") {
    Table t;
    t.cols = 2;
    const double rows[][2] = {{0.0, 0.0}, {1.0, 1.0}};
    t.push_row(rows[0], 1);
    t.push_row(rows[1], 1);
    for (int i = 0; i < 8; ++i) {
        const double majority_row[2] = {5.0, -3.0};
        t.push_row(majority_row, 0);
    }
    const Table out = smote(t, 8, 1, 7);
    const auto [pos, neg] = class_counts(out);
    CHECK(pos == 8);
    for (std::size_t r = t.rows(); r < out.rows(); ++r) {
        CHECK(out.labels[r] == 1);
        const double x = out.row(r)[0], y = out.row(r)[1];
        CHECK(x == doctest::Approx(y));  // on the segment (0,0)-(1,1)
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("smote: coordinate-wise convex combination on random data") {
    const Table input = imbalanced_table(10, 40, 4, 3);
    const Table output = smote(input, 40, 5, 5);
    // every synthetic coordinate lies within the minority bounding box
    double lo[4], hi[4];
    for (int c = 0; c < 4; ++c) {
        lo[c] = 1e300;
        hi[c] = -1e300;
    }
    for (std::size_t r = 0; r < input.rows(); ++r) {
        if (!input.labels[r]) continue;
        for (int c = 0; c < 4; ++c) {
            lo[c] = std::min(lo[c], input.row(r)[c]);
            hi[c] = std::max(hi[c], input.row(r)[c]);
        }
    }
    for (std::size_t r = input.rows(); r < output.rows(); ++r) {
        for (int c = 0; c < 4; ++c) {
            CHECK(output.row(r)[c] >= lo[c] - 1e-12);
            CHECK(output.row(r)[c] <= hi[c] + 1e-12);
        }
    }
}

TEST_CASE("smote determinism and error cases") {
    const Table input = imbalanced_table(5, 20, 3, 11);
    const Table a = smote(input, 20, 5, 42);
    const Table b = smote(input, 20, 5, 42);
    CHECK(a.values == b.values);
    CHECK(a.labels == b.labels);

    Table too_small;
    too_small.cols = 1;
    const double v0 = 0.0, v1 = 1.0;
    too_small.push_row(&v1, 1);
    too_small.push_row(&v0, 0);
    too_small.push_row(&v0, 0);
    CHECK_THROWS_AS(smote(too_small, 2, 5, 1), DataError);
}

TEST_CASE("undersample: majority reduced to minority size without replacement") {
    const Table input = imbalanced_table(26, 574, 3, 2);
    const Table out = undersample(input, 17);
    const auto [pos, neg] = class_counts(out);
    CHECK(pos == 26);
    CHECK(neg == 26);

    // every surviving majority row existed in the input
    std::set<std::vector<double>> input_rows;
    for (std::size_t r = 0; r < input.rows(); ++r) {
        input_rows.insert({input.row(r), input.row(r) + input.cols});
    }
    for (std::size_t r = 0; r < out.rows(); ++r) {
        CHECK(input_rows.count({out.row(r), out.row(r) + out.cols}) == 1);
    }

    SUBCASE("already balanced input is unchanged") {
        const Table balanced = imbalanced_table(10, 10, 3, 4);
        const Table same = undersample(balanced, 5);
        CHECK(same.values == balanced.values);
    }
}

TEST_CASE("fifty_fifty: half boost then equal classes") {
    SUBCASE("26/574 -> 300/300") {
        const Table input = imbalanced_table(26, 574, 4, 6);
        const Table out = fifty_fifty(input, 5, 23);
        const auto [pos, neg] = class_counts(out);
        CHECK(pos == 300);
        CHECK(neg == 300);
    }
    SUBCASE("already balanced input is unchanged") {
        const Table balanced = imbalanced_table(12, 12, 2, 8);
        const Table out = fifty_fifty(balanced, 5, 3);
        CHECK(out.values == balanced.values);
    }
    SUBCASE("classes end equal for assorted shapes") {
        for (const auto& [minority, majority] : std::vector<std::pair<int, int>>{
                 {3, 10}, {7, 8}, {10, 101}, {20, 33}}) {
            const Table input = imbalanced_table(minority, majority, 3, minority + majority);
            const auto [pos, neg] = class_counts(fifty_fifty(input, 5, 9));
            CHECK(pos == neg);
        }
    }
}

TEST_CASE("rebalance dispatch preserves original minority rows") {
    const Table input = imbalanced_table(8, 30, 3, 12);
    for (const auto method : {RebalanceMethod::none, RebalanceMethod::smote,
                              RebalanceMethod::undersampling, RebalanceMethod::fifty_fifty}) {
        RebalanceConfig config;
        config.method = method;
        config.rng_seed = 55;
        const Table out = rebalance(input, config);
        // count original minority rows surviving
        std::set<std::vector<double>> out_rows;
        for (std::size_t r = 0; r < out.rows(); ++r) {
            if (out.labels[r]) out_rows.insert({out.row(r), out.row(r) + out.cols});
        }
        for (std::size_t r = 0; r < input.rows(); ++r) {
            if (!input.labels[r]) continue;
            CHECK(out_rows.count({input.row(r), input.row(r) + input.cols}) == 1);
        }
    }
    CHECK_THROWS_AS(parse_rebalance_method("oversample9000"), ConfigError);
}
