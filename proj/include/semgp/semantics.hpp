#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "semgp/dataset.hpp"
#include "semgp/error.hpp"

namespace semgp {

/// Per-class decision values of one individual over an evaluation set.
/// scores[c][i] is the class-c value on sample i. k = 1 is allowed for
/// single-output intermediates; classification always carries one vector
/// per class.
struct Semantics {
    std::vector<std::vector<double>> scores;

    std::size_t num_classes() const { return scores.size(); }
    std::size_t size() const { return scores.empty() ? 0 : scores[0].size(); }

    bool all_finite() const {
        for (const auto& col : scores)
            for (double v : col)
                if (!std::isfinite(v)) return false;
        return true;
    }
};

/// labels[i] = argmax over classes, ties to the lowest class index.
inline std::vector<int> to_labels(const Semantics& s) {
    if (s.num_classes() < 2) throw Error("to_labels needs at least two class scores");
    const std::size_t n = s.size();
    std::vector<int> labels(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = s.scores[0][i];
        int arg = 0;
        for (std::size_t c = 1; c < s.num_classes(); ++c) {
            if (s.scores[c][i] > best) {
                best = s.scores[c][i];
                arg = static_cast<int>(c);
            }
        }
        labels[i] = arg;
    }
    return labels;
}

/// Dot product over norms; nullopt when either vector has zero norm.
inline std::optional<double> cosine_similarity(const std::vector<double>& v1, const std::vector<double>& v2) {
    if (v1.size() != v2.size()) throw Error("cosine_similarity: length mismatch");
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i) {
        dot += v1[i] * v2[i];
        n1 += v1[i] * v1[i];
        n2 += v2[i] * v2[i];
    }
    if (n1 <= 0.0 || n2 <= 0.0) return std::nullopt;
    return dot / (std::sqrt(n1) * std::sqrt(n2));
}

/// Cosine similarity of the mean-centered vectors; nullopt for constant input.
inline std::optional<double> pearson(const std::vector<double>& v1, const std::vector<double>& v2) {
    if (v1.size() != v2.size()) throw Error("pearson: length mismatch");
    if (v1.size() < 2) throw Error("pearson: needs at least two samples");
    const double m1 = std::accumulate(v1.begin(), v1.end(), 0.0) / static_cast<double>(v1.size());
    const double m2 = std::accumulate(v2.begin(), v2.end(), 0.0) / static_cast<double>(v2.size());
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i) {
        const double a = v1[i] - m1;
        const double b = v2[i] - m2;
        dot += a * b;
        n1 += a * a;
        n2 += b * b;
    }
    if (n1 <= 0.0 || n2 <= 0.0) return std::nullopt;
    return dot / (std::sqrt(n1) * std::sqrt(n2));
}

/// Fraction of positions where the two label vectors agree. Against the
/// true labels this is the accuracy of the other vector.
inline double agreement(const std::vector<int>& l1, const std::vector<int>& l2) {
    if (l1.size() != l2.size()) throw Error("agreement: length mismatch");
    if (l1.empty()) throw Error("agreement: empty input");
    std::size_t same = 0;
    for (std::size_t i = 0; i < l1.size(); ++i)
        if (l1[i] == l2[i]) ++same;
    return static_cast<double>(same) / static_cast<double>(l1.size());
}

enum class SimilarityMeasure { Cosine, Pearson };

/// Average of the absolute per-class similarity. nullopt as soon as one
/// class column is degenerate for the chosen measure.
inline std::optional<double> mean_abs_similarity(const Semantics& s1, const Semantics& s2, SimilarityMeasure measure) {
    if (s1.num_classes() != s2.num_classes() || s1.size() != s2.size())
        throw Error("mean_abs_similarity: shape mismatch");
    if (s1.num_classes() == 0) throw Error("mean_abs_similarity: empty semantics");
    double sum = 0.0;
    for (std::size_t c = 0; c < s1.num_classes(); ++c) {
        const auto value = measure == SimilarityMeasure::Cosine
                               ? cosine_similarity(s1.scores[c], s2.scores[c])
                               : pearson(s1.scores[c], s2.scores[c]);
        if (!value) return std::nullopt;
        sum += std::abs(*value);
    }
    return sum / static_cast<double>(s1.num_classes());
}

/// Angle between the error vectors of two candidates relative to a shared
/// target; nullopt when a candidate coincides with the target.
inline std::optional<double> relative_angle(const std::vector<double>& target,
                                            const std::vector<double>& p1,
                                            const std::vector<double>& p2) {
    if (target.size() != p1.size() || target.size() != p2.size()) throw Error("relative_angle: length mismatch");
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double e1 = target[i] - p1[i];
        const double e2 = target[i] - p2[i];
        dot += e1 * e2;
        n1 += e1 * e1;
        n2 += e2 * e2;
    }
    if (n1 <= 0.0 || n2 <= 0.0) return std::nullopt;
    double cosv = dot / (std::sqrt(n1) * std::sqrt(n2));
    cosv = std::clamp(cosv, -1.0, 1.0);
    return std::acos(cosv);
}

/// Per-class mean of relative_angle, mirroring mean_abs_similarity.
inline std::optional<double> mean_relative_angle(const OvrTargets& targets, const Semantics& s1, const Semantics& s2) {
    if (targets.num_classes() != s1.num_classes() || s1.num_classes() != s2.num_classes())
        throw Error("mean_relative_angle: shape mismatch");
    double sum = 0.0;
    for (std::size_t c = 0; c < targets.num_classes(); ++c) {
        const auto angle = relative_angle(targets.targets[c], s1.scores[c], s2.scores[c]);
        if (!angle) return std::nullopt;
        sum += *angle;
    }
    return sum / static_cast<double>(targets.num_classes());
}

/// Binary correctness fingerprint of a classifier over an evaluation set,
/// bit-packed for fast Hamming distances.
struct BehaviorVector {
    std::vector<std::uint64_t> words;
    std::size_t length = 0;

    bool bit(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1u; }

    static BehaviorVector from_bits(const std::vector<bool>& bits) {
        BehaviorVector b;
        b.length = bits.size();
        b.words.assign((bits.size() + 63) / 64, 0);
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) b.words[i >> 6] |= std::uint64_t{1} << (i & 63);
        return b;
    }
};

inline std::size_t hamming_distance(const BehaviorVector& a, const BehaviorVector& b) {
    if (a.length != b.length) throw Error("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t w = 0; w < a.words.size(); ++w)
        d += static_cast<std::size_t>(std::popcount(a.words[w] ^ b.words[w]));
    return d;
}

inline BehaviorVector behavior_vector(const Semantics& s, const std::vector<int>& true_labels) {
    if (s.size() != true_labels.size()) throw Error("behavior_vector: length mismatch");
    const auto predicted = to_labels(s);
    std::vector<bool> bits(true_labels.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = predicted[i] == true_labels[i];
    return BehaviorVector::from_bits(bits);
}

/// Mean Hamming distance from b to its min(k_nn, archive size) nearest
/// archive members. Equal distances are interchangeable for the mean, so
/// a value-only partial sort suffices.
template <typename Archive>
inline double novelty_score(const BehaviorVector& b, const Archive& archive, std::size_t k_nn) {
    if (std::size(archive) == 0) throw Error("novelty_score: empty archive");
    if (k_nn == 0) throw Error("novelty_score: k_nn must be positive");
    std::vector<std::size_t> distances;
    distances.reserve(std::size(archive));
    for (const auto& member : archive) {
        const BehaviorVector& other = member; // accepts references or values
        distances.push_back(hamming_distance(b, other));
    }
    const std::size_t k = std::min(k_nn, distances.size());
    std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k - 1), distances.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += static_cast<double>(distances[i]);
    return sum / static_cast<double>(k);
}

} // namespace semgp
