#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "semgp/rng.hpp"
#include "semgp/semantics.hpp"

using namespace semgp;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 4.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = (rng.real01() - 0.5) * scale;
    return v;
}

} // namespace

TEST_CASE("to_labels") {
    Semantics s;
    s.scores = {{1.0, -1.0}, {-1.0, 1.0}};
    REQUIRE(to_labels(s) == std::vector<int>{0, 1});

    Semantics tie;
    tie.scores = {{0.5}, {0.5}};
    REQUIRE(to_labels(tie) == std::vector<int>{0});

    Semantics single;
    single.scores = {{1.0}};
    REQUIRE_THROWS_AS(to_labels(single), Error);
}

TEST_CASE("to_labels inverts one-vs-rest targets") {
    Semantics s;
    s.scores = {{1, -1, 1, -1}, {-1, 1, -1, -1}, {-1, -1, -1, 1}};
    REQUIRE(to_labels(s) == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("cosine similarity") {
    REQUIRE(*cosine_similarity({1, 0}, {0, 1}) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(*cosine_similarity({1, 1}, {1, 0}) == Catch::Approx(0.70710678118654752).margin(1e-5));
    REQUIRE(*cosine_similarity({1, 2}, {-2, -4}) == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE_FALSE(cosine_similarity({0, 0}, {1, 2}).has_value());
    REQUIRE_THROWS_AS(cosine_similarity({1}, {1, 2}), Error);
}

TEST_CASE("pearson") {
    REQUIRE(*pearson({1, 2, 3}, {2, 4, 6}) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(*pearson({1, 2, 3}, {3, 2, 1}) == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE_FALSE(pearson({2, 2, 2}, {1, 2, 3}).has_value());
}

TEST_CASE("pearson equals cosine on zero-centered data") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.index(30);
        auto a = random_vector(rng, n);
        auto b = random_vector(rng, n);
        const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
        const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
        for (auto& x : a) x -= ma;
        for (auto& x : b) x -= mb;
        const auto c = cosine_similarity(a, b);
        const auto p = pearson(a, b);
        if (!c || !p) continue;
        REQUIRE(*p == Catch::Approx(*c).margin(1e-12));
    }
}

TEST_CASE("agreement") {
    REQUIRE(agreement({1, 1, 2, 2}, {1, 1, 2, 2}) == 1.0);
    REQUIRE(agreement({1, 1, 2, 2}, {2, 2, 1, 1}) == 0.0);
    REQUIRE_THROWS_AS(agreement({1}, {1, 2}), Error);

    // against the truth, agreement is the accuracy of the other vector
    const std::vector<int> truth{0, 1, 1, 0};
    const std::vector<int> pred{0, 1, 0, 0};
    REQUIRE(agreement(pred, truth) == 0.75);
}

TEST_CASE("agreement properties") {
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.index(20);
        std::vector<int> a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<int>(rng.index(3));
            b[i] = static_cast<int>(rng.index(3));
            c[i] = static_cast<int>(rng.index(3));
        }
        REQUIRE(agreement(a, b) == agreement(b, a));
        REQUIRE(agreement(a, a) == 1.0);
        REQUIRE(agreement(a, c) >= agreement(a, b) + agreement(b, c) - 1.0 - 1e-12);
    }
}

TEST_CASE("mean_abs_similarity") {
    Semantics s1, s2;
    s1.scores = {{1, 0}, {1, 1}};
    s2.scores = {{0, 1}, {2, 2}};
    // class 0 orthogonal (0), class 1 parallel (1)
    REQUIRE(*mean_abs_similarity(s1, s2, SimilarityMeasure::Cosine) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(*mean_abs_similarity(s1, s1, SimilarityMeasure::Cosine) == Catch::Approx(1.0).margin(1e-12));

    Semantics k1a, k1b;
    k1a.scores = {{1, 2, 3}};
    k1b.scores = {{-1, -2, -3}};
    REQUIRE(*mean_abs_similarity(k1a, k1b, SimilarityMeasure::Cosine) == Catch::Approx(1.0).margin(1e-12));

    Semantics zero;
    zero.scores = {{0, 0}, {1, 1}};
    REQUIRE_FALSE(mean_abs_similarity(zero, s2, SimilarityMeasure::Cosine).has_value());
}

TEST_CASE("cosine scaling law and bounds") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(20);
        const auto v = random_vector(rng, n);
        const auto w = random_vector(rng, n);
        const auto c = cosine_similarity(v, w);
        if (c) REQUIRE(std::abs(*c) <= 1.0 + 1e-12);
        const auto p = pearson(v, w);
        if (p) REQUIRE(std::abs(*p) <= 1.0 + 1e-12);

        const double alpha = (rng.real01() - 0.5) * 6.0;
        if (alpha == 0.0) continue;
        std::vector<double> scaled(v);
        for (auto& x : scaled) x *= alpha;
        const auto cs = cosine_similarity(v, scaled);
        if (cs) REQUIRE(*cs == Catch::Approx(alpha > 0 ? 1.0 : -1.0).margin(1e-9));
    }
}

TEST_CASE("pearson affine invariance") {
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.index(20);
        const auto v = random_vector(rng, n);
        const auto w = random_vector(rng, n);
        const auto base = pearson(v, w);
        if (!base) continue;
        const double alpha = rng.real01() * 3.0 + 0.1;
        const double beta = (rng.real01() - 0.5) * 10.0;
        std::vector<double> pos(v), neg(v);
        for (auto& x : pos) x = alpha * x + beta;
        for (auto& x : neg) x = -alpha * x + beta;
        REQUIRE(*pearson(pos, w) == Catch::Approx(*base).margin(1e-9));
        REQUIRE(*pearson(neg, w) == Catch::Approx(-*base).margin(1e-9));
    }
}

TEST_CASE("relative angle") {
    REQUIRE(*relative_angle({0, 0}, {-1, 0}, {0, -1}) == Catch::Approx(std::acos(0.0)).margin(1e-12));
    // acos near 1 amplifies the last rounding bit to ~sqrt(eps)
    REQUIRE(*relative_angle({0, 0}, {1, 1}, {1, 1}) == Catch::Approx(0.0).margin(1e-7));
    REQUIRE_FALSE(relative_angle({1, 2}, {1, 2}, {0, 0}).has_value());
}

TEST_CASE("relative angle symmetry and scale invariance") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(10);
        const auto t = random_vector(rng, n);
        const auto p1 = random_vector(rng, n);
        const auto p2 = random_vector(rng, n);
        const auto a = relative_angle(t, p1, p2);
        const auto b = relative_angle(t, p2, p1);
        if (!a || !b) continue;
        REQUIRE(*a == Catch::Approx(*b).margin(1e-12));
        REQUIRE(*a >= 0.0);
        REQUIRE(*a <= std::acos(-1.0) + 1e-12);

        // scaling both error vectors by the same positive factor
        const double s = rng.real01() * 4.0 + 0.25;
        std::vector<double> q1(n), q2(n);
        for (std::size_t i = 0; i < n; ++i) {
            q1[i] = t[i] - s * (t[i] - p1[i]);
            q2[i] = t[i] - s * (t[i] - p2[i]);
        }
        REQUIRE(*relative_angle(t, q1, q2) == Catch::Approx(*a).margin(1e-9));
    }
}

TEST_CASE("behavior vectors") {
    Semantics s;
    s.scores = {{1, -1, 1, 1}, {-1, 1, -1, -1}};
    const std::vector<int> truth{0, 1, 0, 1};
    const auto b = behavior_vector(s, truth);
    REQUIRE(b.length == 4);
    REQUIRE(b.bit(0));
    REQUIRE(b.bit(1));
    REQUIRE(b.bit(2));
    REQUIRE_FALSE(b.bit(3));

    const auto perfect = behavior_vector(s, to_labels(s));
    for (std::size_t i = 0; i < 4; ++i) REQUIRE(perfect.bit(i));

    Semantics wrong;
    wrong.scores = {{-1, 1}, {1, -1}};
    const auto none = behavior_vector(wrong, {0, 1});
    REQUIRE(hamming_distance(none, BehaviorVector::from_bits({false, false})) == 0);
}

TEST_CASE("novelty score") {
    const auto b = BehaviorVector::from_bits({true, true, false, false});
    std::vector<BehaviorVector> same{b, b, b};
    REQUIRE(novelty_score(b, same, 15) == 0.0);

    std::vector<BehaviorVector> one{BehaviorVector::from_bits({false, false, true, false})};
    REQUIRE(novelty_score(b, one, 1) == 3.0);

    std::vector<BehaviorVector> mixed{
        BehaviorVector::from_bits({true, false, false, false}),                         // distance 1
        BehaviorVector::from_bits({true, true, true, false}),                           // distance 1
        BehaviorVector::from_bits({false, false, true, true}),                          // distance 4
    };
    REQUIRE(novelty_score(b, mixed, 2) == 1.0);
    REQUIRE_THROWS_AS(novelty_score(b, std::vector<BehaviorVector>{}, 1), Error);
}

TEST_CASE("novelty matches a brute-force oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 8 + rng.index(120);
        const std::size_t archive_size = 1 + rng.index(100);
        auto random_behavior = [&] {
            std::vector<bool> bits(n);
            for (std::size_t i = 0; i < n; ++i) bits[i] = rng.index(2) == 1;
            return BehaviorVector::from_bits(bits);
        };
        const auto b = random_behavior();
        std::vector<BehaviorVector> archive;
        for (std::size_t i = 0; i < archive_size; ++i) archive.push_back(random_behavior());
        const std::size_t k = 1 + rng.index(20);

        // independent route: bit-by-bit distances, full sort
        std::vector<std::size_t> dist;
        for (const auto& a : archive) {
            std::size_t d = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (a.bit(i) != b.bit(i)) ++d;
            dist.push_back(d);
        }
        std::sort(dist.begin(), dist.end());
        const std::size_t kk = std::min(k, dist.size());
        double expected = 0.0;
        for (std::size_t i = 0; i < kk; ++i) expected += static_cast<double>(dist[i]);
        expected /= static_cast<double>(kk);

        REQUIRE(novelty_score(b, archive, k) == Catch::Approx(expected).margin(1e-12));
    }
}
