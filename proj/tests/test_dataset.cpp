#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "semgp/dataset.hpp"
#include "semgp/rng.hpp"

using namespace semgp;

namespace {

Dataset from_string(const std::string& text, CsvOptions opts = {}) {
    std::istringstream in(text);
    return load_csv_stream(in, opts, "inline");
}

} // namespace

TEST_CASE("labels map to dense indices in first-appearance order") {
    const auto ds = from_string("1,a\n2,a\n3,b\n4,b\n");
    REQUIRE(ds.rows == 4);
    REQUIRE(ds.cols == 1);
    REQUIRE(ds.num_classes() == 2);
    REQUIRE(ds.class_names == std::vector<std::string>{"a", "b"});
    REQUIRE(ds.labels == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("iris loads with the expected shape") {
    const auto ds = load_csv(std::string(SEMGP_DATA_DIR) + "/iris.csv");
    REQUIRE(ds.rows == 150);
    REQUIRE(ds.cols == 4);
    REQUIRE(ds.num_classes() == 3);
    REQUIRE(has_all_classes(ds));
}

TEST_CASE("rejected missing values carry a location") {
    REQUIRE_THROWS_AS(from_string("1,a\nNaN,b\n"), ParseError);
    try {
        from_string("1,a\n2,b\nNaN,a\n");
    } catch (const ParseError& e) {
        REQUIRE(e.row() == 3);
        REQUIRE(e.column() == 1);
    }
    REQUIRE_THROWS_AS(from_string("1,a\nx7,b\n"), ParseError);
}

TEST_CASE("mean imputation fills missing cells") {
    CsvOptions opts;
    opts.missing = MissingPolicy::ImputeMean;
    const auto ds = from_string("1,10,a\n3,NaN,b\n,10,a\n", opts);
    REQUIRE(ds.feature(1, 1) == 10.0); // column mean of the present cells
    REQUIRE(ds.feature(2, 0) == 2.0);
}

TEST_CASE("single-class input is rejected") {
    REQUIRE_THROWS_AS(from_string("1,a\n2,a\n"), Error);
}

TEST_CASE("header and named label column") {
    CsvOptions opts;
    opts.header = true;
    opts.label_name = "species";
    const auto ds = from_string("species,x\na,1\nb,2\n", opts);
    REQUIRE(ds.cols == 1);
    REQUIRE(ds.class_names == std::vector<std::string>{"a", "b"});
    REQUIRE(ds.feature(1, 0) == 2.0);
}

TEST_CASE("label column by index") {
    CsvOptions opts;
    opts.label_index = 0;
    const auto ds = from_string("a,1,2\nb,3,4\n", opts);
    REQUIRE(ds.cols == 2);
    REQUIRE(ds.feature(0, 1) == 2.0);
}

TEST_CASE("random_split partitions deterministically") {
    const auto ds = from_string("1,a\n2,a\n3,a\n4,a\n5,b\n6,b\n7,b\n8,b\n9,b\n10,b\n");
    auto [train, test] = random_split(ds, 0.7, 42);
    REQUIRE(train.rows == 7);
    REQUIRE(test.rows == 3);

    std::multiset<double> all;
    for (std::size_t i = 0; i < train.rows; ++i) all.insert(train.feature(i, 0));
    for (std::size_t i = 0; i < test.rows; ++i) all.insert(test.feature(i, 0));
    std::multiset<double> expected;
    for (int v = 1; v <= 10; ++v) expected.insert(v);
    REQUIRE(all == expected); // disjoint and exhaustive

    auto [train2, test2] = random_split(ds, 0.7, 42);
    REQUIRE(train2.features == train.features);
    REQUIRE(train2.labels == train.labels);
    REQUIRE(test2.features == test.features);
}

TEST_CASE("iris 70/30 split sizes") {
    const auto ds = load_csv(std::string(SEMGP_DATA_DIR) + "/iris.csv");
    auto [train, test] = random_split(ds, 0.7, 1);
    REQUIRE(train.rows == 105);
    REQUIRE(test.rows == 45);
}

TEST_CASE("degenerate split fractions fail") {
    const auto ds = from_string("1,a\n2,b\n3,a\n");
    REQUIRE_THROWS_AS(random_split(ds, 0.01, 1), Error);
    REQUIRE_THROWS_AS(random_split(ds, 1.5, 1), Error);
}

TEST_CASE("class entropy") {
    SECTION("balanced three classes is exactly 1") {
        const auto ds = from_string("1,a\n2,b\n3,c\n4,a\n5,b\n6,c\n");
        REQUIRE(class_entropy(ds) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("0.9/0.1 two-class mix") {
        std::string text;
        for (int i = 0; i < 9; ++i) text += std::to_string(i) + ",a\n";
        text += "9,b\n";
        const auto ds = from_string(text);
        REQUIRE(class_entropy(ds) == Catch::Approx(0.46899559358928122).margin(1e-10));
    }
    SECTION("strictly decreases when balance is broken") {
        const auto balanced = from_string("1,a\n2,b\n3,a\n4,b\n");
        const auto skewed = from_string("1,a\n2,a\n3,a\n4,b\n");
        REQUIRE(class_entropy(skewed) < class_entropy(balanced));
        REQUIRE(class_entropy(skewed) > 0.0);
        REQUIRE(class_entropy(skewed) < 1.0);
    }
}

TEST_CASE("one-vs-rest targets") {
    const auto ds = from_string("1,a\n2,b\n3,a\n");
    const auto t = ovr_targets(ds);
    REQUIRE(t.num_classes() == 2);
    REQUIRE(t.targets[0] == std::vector<double>{1.0, -1.0, 1.0});
    REQUIRE(t.targets[1] == std::vector<double>{-1.0, 1.0, -1.0});

    // exactly one +1 per sample
    for (std::size_t i = 0; i < ds.rows; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < t.num_classes(); ++c) sum += (t.targets[c][i] + 1.0) / 2.0;
        REQUIRE(sum == 1.0);
    }
}

TEST_CASE("ovr targets invert to the labels") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + rng.index(40);
        std::string text;
        text += "0,a\n0,b\n0,c\n"; // keep every class present
        for (std::size_t i = 3; i < n; ++i)
            text += std::to_string(i) + "," + std::string(1, static_cast<char>('a' + rng.index(3))) + "\n";
        const auto ds = from_string(text);
        const auto t = ovr_targets(ds);
        for (std::size_t i = 0; i < ds.rows; ++i) {
            int best = 0;
            for (std::size_t c = 1; c < t.num_classes(); ++c)
                if (t.targets[c][i] > t.targets[static_cast<std::size_t>(best)][i]) best = static_cast<int>(c);
            REQUIRE(best == ds.labels[i]);
        }
    }
}

TEST_CASE("a header label column beyond the data width is rejected") {
    CsvOptions opts;
    opts.header = true;
    opts.label_name = "extra";
    std::istringstream in("x,y,extra\n1,a\n2,b\n"); // data rows are narrower than the header
    REQUIRE_THROWS_AS(load_csv_stream(in, opts, "ragged"), Error);
}

TEST_CASE("ovr targets on the iris training split") {
    const auto ds = load_csv(std::string(SEMGP_DATA_DIR) + "/iris.csv");
    auto [train, test] = random_split(ds, 0.7, 2);
    const auto t = ovr_targets(train);
    REQUIRE(t.num_classes() == 3);
    REQUIRE(t.size() == 105);
    for (const auto& column : t.targets) REQUIRE(column.size() == 105);
}
