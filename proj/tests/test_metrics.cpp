#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "semgp/metrics.hpp"
#include "semgp/rng.hpp"

using namespace semgp;

TEST_CASE("macro F1") {
    REQUIRE(macro_f1({0, 1, 2, 0}, {0, 1, 2, 0}, 3) == 1.0);

    // hand confusion-matrix oracle: class0 F1 = 2/3, class1 F1 = 4/5
    REQUIRE(macro_f1({0, 0, 1, 1}, {0, 1, 1, 1}, 2) == Catch::Approx(11.0 / 15.0).margin(1e-12));

    // constant predictor on a balanced two-class truth
    REQUIRE(macro_f1({0, 0, 1, 1}, {0, 0, 0, 0}, 2) == Catch::Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("macro F1 counts catalog classes missing from the truth") {
    // class 2 never appears; its F1 is 0 but it stays in the denominator
    REQUIRE(macro_f1({0, 1}, {0, 1}, 3) == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("macro F1 invariances") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + rng.index(30);
        const std::size_t k = 2 + rng.index(3);
        std::vector<int> t(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<int>(rng.index(k));
            p[i] = static_cast<int>(rng.index(k));
        }
        const double base = macro_f1(t, p, k);
        REQUIRE(base <= 1.0);
        REQUIRE((base == 1.0) == (t == p));

        // joint row shuffle
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        Rng rng2(trial);
        rng2.shuffle(order);
        std::vector<int> ts(n), ps(n);
        for (std::size_t i = 0; i < n; ++i) {
            ts[i] = t[order[i]];
            ps[i] = p[order[i]];
        }
        REQUIRE(macro_f1(ts, ps, k) == Catch::Approx(base).margin(1e-12));

        // class relabeling (rotation)
        std::vector<int> tr(n), pr(n);
        for (std::size_t i = 0; i < n; ++i) {
            tr[i] = (t[i] + 1) % static_cast<int>(k);
            pr[i] = (p[i] + 1) % static_cast<int>(k);
        }
        REQUIRE(macro_f1(tr, pr, k) == Catch::Approx(base).margin(1e-12));
    }
}

TEST_CASE("accuracy equals agreement") {
    const std::vector<int> t{0, 1, 1, 0, 2};
    const std::vector<int> p{0, 1, 0, 0, 2};
    REQUIRE(accuracy(t, p) == 0.8);
    REQUIRE(accuracy(t, p) == agreement(t, p));
    REQUIRE(accuracy(t, t) == 1.0);
}

TEST_CASE("confusion matrix row sums match class counts") {
    const std::vector<int> t{0, 0, 1, 1, 1, 2};
    const std::vector<int> p{0, 1, 1, 1, 0, 2};
    const auto cm = confusion_matrix(t, p, 3);
    REQUIRE(cm[0][0] + cm[0][1] + cm[0][2] == 2);
    REQUIRE(cm[1][0] + cm[1][1] + cm[1][2] == 3);
    REQUIRE(cm[2][2] == 1);
    REQUIRE_THROWS_AS(confusion_matrix({0, 5}, {0, 0}, 3), Error);
}

TEST_CASE("time per sample") {
    REQUIRE(time_per_sample(10.0, 100) == 0.1);
    REQUIRE(time_per_sample(0.0, 50) == 0.0);
    REQUIRE(time_per_sample(6.0, 3) == 3.0 * time_per_sample(2.0, 3));
    REQUIRE_THROWS_AS(time_per_sample(1.0, 0), Error);
}

namespace {

ScoreTable table_of(std::vector<std::string> systems, std::vector<std::string> datasets,
                    std::vector<std::vector<std::optional<double>>> values) {
    ScoreTable st;
    st.systems = std::move(systems);
    st.datasets = std::move(datasets);
    st.values = std::move(values);
    return st;
}

} // namespace

TEST_CASE("competition ranking") {
    SECTION("distinct values") {
        const auto rt = rank_scores(table_of({"a", "b", "c"}, {"d"}, {{0.9}, {0.8}, {0.7}}));
        REQUIRE(rt.ranks[0][0] == 1.0);
        REQUIRE(rt.ranks[1][0] == 2.0);
        REQUIRE(rt.ranks[2][0] == 3.0);
    }
    SECTION("ties share a rank and the next rank skips") {
        const auto rt = rank_scores(table_of({"a", "b", "c"}, {"d"}, {{0.9}, {0.9}, {0.8}}));
        REQUIRE(rt.ranks[0][0] == 1.0);
        REQUIRE(rt.ranks[1][0] == 1.0);
        REQUIRE(rt.ranks[2][0] == 3.0);
    }
    SECTION("full tie gives everyone rank 1") {
        const auto rt = rank_scores(table_of({"a", "b", "c"}, {"d"}, {{0.5}, {0.5}, {0.5}}));
        for (std::size_t i = 0; i < 3; ++i) REQUIRE(rt.ranks[i][0] == 1.0);
    }
    SECTION("a missing value takes the worst rank") {
        const auto rt = rank_scores(table_of({"a", "b", "c"}, {"d"}, {{0.9}, {std::nullopt}, {0.8}}));
        REQUIRE(rt.ranks[0][0] == 1.0);
        REQUIRE(rt.ranks[1][0] == 3.0);
        REQUIRE(rt.ranks[2][0] == 2.0);
    }
}

TEST_CASE("friedman statistic") {
    SECTION("frozen 3x4 hand computation") {
        // scores chosen so the competition ranks rotate; the exact
        // statistic worked out by hand is 1/2 with p = 0.77880078...
        const auto st = table_of({"A", "B", "C"}, {"d1", "d2", "d3", "d4"},
                                 {{0.9, 0.5, 0.8, 0.7}, {0.8, 0.9, 0.5, 0.9}, {0.7, 0.7, 0.9, 0.5}});
        const auto rt = rank_scores(st);
        REQUIRE(rt.mean_rank[0] == Catch::Approx(2.0).margin(1e-15));
        REQUIRE(rt.mean_rank[1] == Catch::Approx(1.75).margin(1e-15));
        REQUIRE(rt.mean_rank[2] == Catch::Approx(2.25).margin(1e-15));
        const auto fr = friedman_test(rt);
        REQUIRE(fr.statistic == Catch::Approx(0.5).margin(1e-9));
        REQUIRE(fr.p_value == Catch::Approx(0.7788007830714049).margin(1e-9));
    }
    SECTION("all tied means statistic 0 and p 1") {
        const auto st = table_of({"A", "B"}, {"d1", "d2"}, {{0.5, 0.7}, {0.5, 0.7}}); // identical values
        const auto fr = friedman_test(rank_scores(st));
        REQUIRE(fr.statistic == 0.0);
        REQUIRE(fr.p_value == 1.0);
    }
    SECTION("invariant under dataset permutation") {
        const auto a = table_of({"A", "B"}, {"d1", "d2", "d3"}, {{0.9, 0.4, 0.6}, {0.7, 0.6, 0.5}});
        const auto b = table_of({"A", "B"}, {"d3", "d1", "d2"}, {{0.6, 0.9, 0.4}, {0.5, 0.7, 0.6}});
        REQUIRE(friedman_test(rank_scores(a)).statistic ==
                Catch::Approx(friedman_test(rank_scores(b)).statistic).margin(1e-12));
    }
}

TEST_CASE("nemenyi groups") {
    SECTION("equal mean ranks collapse into one group") {
        const auto st = table_of({"A", "B"}, {"d1", "d2"}, {{0.9, 0.4}, {0.4, 0.9}});
        const auto res = nemenyi_groups(rank_scores(st), 0.10);
        REQUIRE(res.groups.size() == 1);
        REQUIRE(res.groups[0].size() == 2);
    }
    SECTION("far apart mean ranks split into singletons") {
        RankTable rt;
        rt.systems = {"A", "B"};
        rt.datasets = {"d1"};
        rt.ranks = {{1.0}, {5.0}};
        rt.mean_rank = {1.0, 5.0};
        const auto res = nemenyi_groups(rt, 0.10);
        REQUIRE(res.groups.size() == 2);
        REQUIRE(res.groups[0] == std::vector<std::string>{"A"});
        REQUIRE(res.groups[1] == std::vector<std::string>{"B"});
    }
    SECTION("critical difference closed form for two systems") {
        RankTable rt;
        rt.systems = {"A", "B"};
        rt.datasets.assign(10, "");
        rt.ranks = {std::vector<double>(10, 1.0), std::vector<double>(10, 2.0)};
        rt.mean_rank = {1.0, 2.0};
        const auto res = nemenyi_groups(rt, 0.10);
        // q_{0.10}(2) * sqrt(2*3 / (6*10)) with the tabulated q
        REQUIRE(res.critical_difference == Catch::Approx(1.644854 * std::sqrt(1.0 / 10.0)).margin(1e-6));
        REQUIRE(res.critical_difference == Catch::Approx(0.5201483878755574).margin(1e-5));
    }
    SECTION("unsupported alpha is rejected") {
        RankTable rt;
        rt.systems = {"A", "B"};
        rt.datasets = {"d"};
        rt.ranks = {{1.0}, {2.0}};
        rt.mean_rank = {1.0, 2.0};
        REQUIRE_THROWS_AS(nemenyi_groups(rt, 0.01), Error);
    }
}

TEST_CASE("nemenyi q values match the published table") {
    REQUIRE(nemenyi_q(2, 0.05) == Catch::Approx(1.960).margin(5e-4));
    REQUIRE(nemenyi_q(5, 0.05) == Catch::Approx(2.728).margin(5e-4));
    REQUIRE(nemenyi_q(10, 0.05) == Catch::Approx(3.164).margin(5e-4));
    REQUIRE(nemenyi_q(2, 0.10) == Catch::Approx(1.645).margin(5e-4));
    REQUIRE(nemenyi_q(7, 0.10) == Catch::Approx(2.693).margin(5e-4));
    REQUIRE(nemenyi_q(10, 0.10) == Catch::Approx(2.920).margin(5e-4));
}
