#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "semgp/error.hpp"
#include "semgp/semantics.hpp"

namespace semgp {

inline std::vector<std::vector<std::size_t>> confusion_matrix(const std::vector<int>& y_true,
                                                              const std::vector<int>& y_pred,
                                                              std::size_t k) {
    if (y_true.size() != y_pred.size()) throw Error("confusion_matrix: length mismatch");
    std::vector<std::vector<std::size_t>> m(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = static_cast<std::size_t>(y_true[i]);
        const auto p = static_cast<std::size_t>(y_pred[i]);
        if (t >= k || p >= k) throw Error("confusion_matrix: label outside catalog");
        ++m[t][p];
    }
    return m;
}

/// Per-class F1 over the full class catalog. A class with zero precision
/// and recall scores 0, which keeps tiny splits that drop a class well
/// defined.
inline std::vector<double> per_class_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred, std::size_t k) {
    const auto cm = confusion_matrix(y_true, y_pred, k);
    std::vector<double> f1(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t tp = cm[c][c], fp = 0, fn = 0;
        for (std::size_t o = 0; o < k; ++o) {
            if (o == c) continue;
            fp += cm[o][c];
            fn += cm[c][o];
        }
        const double denom = static_cast<double>(2 * tp + fp + fn);
        f1[c] = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    }
    return f1;
}

/// Unweighted mean of the per-class F1 scores over all k catalog classes.
inline double macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred, std::size_t k) {
    const auto f1 = per_class_f1(y_true, y_pred, k);
    return std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(k);
}

inline double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    return agreement(y_true, y_pred);
}

inline double time_per_sample(double wall_seconds, std::size_t n_train) {
    if (wall_seconds < 0.0) throw Error("time_per_sample: negative duration");
    if (n_train == 0) throw Error("time_per_sample: zero samples");
    return wall_seconds / static_cast<double>(n_train);
}

/// systems x datasets macro-F1 values; a missing cell marks a system that
/// could not solve that dataset.
struct ScoreTable {
    std::vector<std::string> systems;
    std::vector<std::string> datasets;
    std::vector<std::vector<std::optional<double>>> values; // [system][dataset]
};

struct RankTable {
    std::vector<std::string> systems;
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> ranks; // [system][dataset]
    std::vector<double> mean_rank;          // per system
};

/// Competition ranking per dataset: rank 1 for the highest value, ties
/// share a rank and the next rank skips by the tie count. Missing values
/// are assigned the worst rank (the number of systems).
inline RankTable rank_scores(const ScoreTable& st) {
    const std::size_t s = st.systems.size();
    const std::size_t d = st.datasets.size();
    if (s == 0 || d == 0) throw Error("rank_scores: empty table");

    RankTable rt;
    rt.systems = st.systems;
    rt.datasets = st.datasets;
    rt.ranks.assign(s, std::vector<double>(d, 0.0));

    for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::size_t> present;
        for (std::size_t i = 0; i < s; ++i) {
            if (st.values[i][j])
                present.push_back(i);
            else
                rt.ranks[i][j] = static_cast<double>(s);
        }
        std::sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
            return *st.values[a][j] > *st.values[b][j];
        });
        std::size_t pos = 0;
        while (pos < present.size()) {
            std::size_t end = pos;
            while (end + 1 < present.size() &&
                   *st.values[present[end + 1]][j] == *st.values[present[pos]][j])
                ++end;
            for (std::size_t t = pos; t <= end; ++t)
                rt.ranks[present[t]][j] = static_cast<double>(pos + 1);
            pos = end + 1;
        }
    }

    rt.mean_rank.resize(s);
    for (std::size_t i = 0; i < s; ++i)
        rt.mean_rank[i] = std::accumulate(rt.ranks[i].begin(), rt.ranks[i].end(), 0.0) / static_cast<double>(d);
    return rt;
}

struct FriedmanResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Friedman chi-square from mean ranks. The centered form is used so that
/// a fully tied table (every system shares rank 1 everywhere under the
/// competition tie rule) yields statistic 0; for untied rankings it equals
/// the textbook expression.
inline FriedmanResult friedman_test(const RankTable& rt) {
    const std::size_t s = rt.systems.size();
    const std::size_t d = rt.datasets.size();
    if (s < 2 || d < 2) throw Error("friedman_test: needs at least 2 systems and 2 datasets");

    const double grand = std::accumulate(rt.mean_rank.begin(), rt.mean_rank.end(), 0.0) / static_cast<double>(s);
    double ss = 0.0;
    for (double r : rt.mean_rank) ss += (r - grand) * (r - grand);

    FriedmanResult res;
    res.statistic = 12.0 * static_cast<double>(d) / (static_cast<double>(s) * static_cast<double>(s + 1)) * ss;
    if (res.statistic <= 0.0) {
        res.statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }
    boost::math::chi_squared dist(static_cast<double>(s - 1));
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    return res;
}

namespace detail {

// Critical values of the studentized range statistic divided by sqrt(2),
// for 2..25 systems at infinite degrees of freedom.
inline constexpr std::array<double, 24> kNemenyiQ05 = {
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878, 3.101730,
    3.163684, 3.218654, 3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425,
    3.488685, 3.517073, 3.543799, 3.569040, 3.592946, 3.615646, 3.637252, 3.657861};

inline constexpr std::array<double, 24> kNemenyiQ10 = {
    1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884, 2.854606,
    2.919889, 2.977768, 3.029694, 3.076733, 3.119693, 3.159199, 3.195743, 3.229723,
    3.261461, 3.291224, 3.319233, 3.345676, 3.370712, 3.394477, 3.417089, 3.438651};

} // namespace detail

inline double nemenyi_q(std::size_t systems, double alpha) {
    if (systems < 2 || systems > 25) throw Error("nemenyi_q: tabulated for 2..25 systems");
    if (alpha == 0.05) return detail::kNemenyiQ05[systems - 2];
    if (alpha == 0.10) return detail::kNemenyiQ10[systems - 2];
    throw Error("nemenyi_q: alpha must be 0.05 or 0.10");
}

struct NemenyiResult {
    double critical_difference = 0.0;
    // Systems sorted by mean rank, partitioned into maximal chains whose
    // extreme mean ranks differ by less than the critical difference.
    std::vector<std::vector<std::string>> groups;
};

inline NemenyiResult nemenyi_groups(const RankTable& rt, double alpha) {
    const std::size_t s = rt.systems.size();
    const std::size_t d = rt.datasets.size();
    if (s < 2 || d < 1) throw Error("nemenyi_groups: empty table");

    NemenyiResult res;
    res.critical_difference =
        nemenyi_q(s, alpha) * std::sqrt(static_cast<double>(s) * static_cast<double>(s + 1) / (6.0 * static_cast<double>(d)));

    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rt.mean_rank[a] != rt.mean_rank[b]) return rt.mean_rank[a] < rt.mean_rank[b];
        return rt.systems[a] < rt.systems[b];
    });

    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < s; ++i) {
        std::size_t j = i;
        while (j + 1 < s && rt.mean_rank[order[j + 1]] - rt.mean_rank[order[i]] < res.critical_difference)
            ++j;
        if (res.groups.empty() || j + 1 > prev_end) { // skip chains nested in the previous one
            std::vector<std::string> group;
            for (std::size_t t = i; t <= j; ++t) group.push_back(rt.systems[order[t]]);
            res.groups.push_back(std::move(group));
            prev_end = j + 1;
        }
    }
    return res;
}

} // namespace semgp
