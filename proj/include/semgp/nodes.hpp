#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "semgp/dataset.hpp"
#include "semgp/error.hpp"
#include "semgp/metrics.hpp"
#include "semgp/semantics.hpp"

namespace semgp {

// ---------------------------------------------------------------------------
// Function set

enum class FunctionKind {
    Terminal,
    Add,
    Mul,
    Max,
    Min,
    Sqrt,
    Abs,
    Sin,
    Tan,
    Atan,
    Tanh,
    Hypot,
    NBGauss,
    NBMultinomial,
    NearestCentroid,
};

struct FunctionSpec {
    FunctionKind kind;
    int arity;
};

inline int default_arity(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::Terminal: return 0;
        case FunctionKind::Add: return 60;
        case FunctionKind::Mul: return 20;
        case FunctionKind::Max: return 5;
        case FunctionKind::Min: return 5;
        case FunctionKind::Sqrt:
        case FunctionKind::Abs:
        case FunctionKind::Sin:
        case FunctionKind::Tan:
        case FunctionKind::Atan:
        case FunctionKind::Tanh: return 1;
        case FunctionKind::Hypot: return 2;
        case FunctionKind::NBGauss: return 5;
        case FunctionKind::NBMultinomial: return 5;
        case FunctionKind::NearestCentroid: return 2;
    }
    return 0;
}

inline std::vector<FunctionSpec> default_function_set() {
    std::vector<FunctionSpec> fs;
    for (FunctionKind k : {FunctionKind::Add, FunctionKind::Mul, FunctionKind::Max, FunctionKind::Min,
                           FunctionKind::Sqrt, FunctionKind::Abs, FunctionKind::Sin, FunctionKind::Tan,
                           FunctionKind::Atan, FunctionKind::Tanh, FunctionKind::Hypot, FunctionKind::NBGauss,
                           FunctionKind::NBMultinomial, FunctionKind::NearestCentroid})
        fs.push_back({k, default_arity(k)});
    return fs;
}

inline std::string_view kind_name(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::Terminal: return "terminal";
        case FunctionKind::Add: return "add";
        case FunctionKind::Mul: return "mul";
        case FunctionKind::Max: return "max";
        case FunctionKind::Min: return "min";
        case FunctionKind::Sqrt: return "sqrt";
        case FunctionKind::Abs: return "abs";
        case FunctionKind::Sin: return "sin";
        case FunctionKind::Tan: return "tan";
        case FunctionKind::Atan: return "atan";
        case FunctionKind::Tanh: return "tanh";
        case FunctionKind::Hypot: return "hypot";
        case FunctionKind::NBGauss: return "nb_gauss";
        case FunctionKind::NBMultinomial: return "nb_multinomial";
        case FunctionKind::NearestCentroid: return "nearest_centroid";
    }
    return "?";
}

inline std::optional<FunctionKind> kind_from_name(std::string_view name) {
    for (FunctionKind k : {FunctionKind::Terminal, FunctionKind::Add, FunctionKind::Mul, FunctionKind::Max,
                           FunctionKind::Min, FunctionKind::Sqrt, FunctionKind::Abs, FunctionKind::Sin,
                           FunctionKind::Tan, FunctionKind::Atan, FunctionKind::Tanh, FunctionKind::Hypot,
                           FunctionKind::NBGauss, FunctionKind::NBMultinomial, FunctionKind::NearestCentroid})
        if (kind_name(k) == name) return k;
    return std::nullopt;
}

inline bool is_classifier_kind(FunctionKind kind) {
    return kind == FunctionKind::NBGauss || kind == FunctionKind::NBMultinomial ||
           kind == FunctionKind::NearestCentroid;
}

inline bool is_transform_kind(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::Mul:
        case FunctionKind::Max:
        case FunctionKind::Min:
        case FunctionKind::Sqrt:
        case FunctionKind::Abs:
        case FunctionKind::Sin:
        case FunctionKind::Tan:
        case FunctionKind::Atan:
        case FunctionKind::Tanh:
        case FunctionKind::Hypot: return true;
        default: return false;
    }
}

// ---------------------------------------------------------------------------
// Ordinary least squares

struct OlsResult {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;      // design * coefficients
    double residual_ss = 0.0;
};

/// Minimum-norm least squares via a rank-revealing complete orthogonal
/// decomposition; pivots below 1e-10 of the largest are treated as zero,
/// so rank-deficient designs get pseudo-inverse semantics.
inline OlsResult ols_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target) {
    if (design.rows() < 1 || design.cols() < 1) throw Error("ols_fit: empty design");
    if (design.rows() != target.rows()) throw Error("ols_fit: row mismatch");
    if (!design.allFinite() || !target.allFinite()) throw Error("ols_fit: non-finite input");

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(design);

    OlsResult res;
    res.coefficients = cod.solve(target);
    res.fitted = design * res.coefficients;
    res.residual_ss = (target - res.fitted).squaredNorm();
    return res;
}

/// Each argument contributes its class columns in order: arg0 class 0..k-1,
/// then arg1, and so on.
inline Eigen::MatrixXd feature_columns(const std::vector<const Semantics*>& args) {
    if (args.empty()) throw Error("feature_columns: no arguments");
    const std::size_t n = args.front()->size();
    std::size_t p = 0;
    for (const Semantics* a : args) {
        if (a->size() != n) throw Error("feature_columns: sample-count mismatch");
        p += a->num_classes();
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    Eigen::Index col = 0;
    for (const Semantics* a : args)
        for (const auto& scores : a->scores) {
            for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), col) = scores[i];
            ++col;
        }
    return m;
}

inline Eigen::MatrixXd feature_columns(const std::vector<Semantics>& args) {
    std::vector<const Semantics*> ptrs;
    ptrs.reserve(args.size());
    for (const auto& a : args) ptrs.push_back(&a);
    return feature_columns(ptrs);
}

// ---------------------------------------------------------------------------
// Embedded classifiers

struct NBGaussState {
    std::vector<double> log_priors;
    std::vector<std::vector<double>> means;     // [class][column]
    std::vector<std::vector<double>> variances; // floored, never zero
};

struct NBMultinomialState {
    std::vector<double> log_priors;
    std::vector<double> shift;                 // per-column training minimum
    std::vector<std::vector<double>> log_phi;  // [class][column]
};

struct NearestCentroidState {
    std::vector<std::vector<double>> centroids; // [class][column]
};

using ClassifierState = std::variant<std::monostate, NBGaussState, NBMultinomialState, NearestCentroidState>;

namespace detail {

inline std::vector<std::size_t> class_counts(const std::vector<int>& labels, std::size_t k) {
    std::vector<std::size_t> counts(k, 0);
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= k) throw Error("label outside catalog");
        ++counts[static_cast<std::size_t>(l)];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] == 0) throw Error("classifier fit: class " + std::to_string(c) + " has no samples");
    return counts;
}

} // namespace detail

inline NBGaussState fit_nb_gauss_state(const Eigen::MatrixXd& features, const std::vector<int>& labels, std::size_t k) {
    const auto n = static_cast<std::size_t>(features.rows());
    const auto p = static_cast<std::size_t>(features.cols());
    if (labels.size() != n) throw Error("fit_nb_gauss: label count mismatch");
    const auto counts = detail::class_counts(labels, k);

    NBGaussState st;
    st.log_priors.resize(k);
    st.means.assign(k, std::vector<double>(p, 0.0));
    st.variances.assign(k, std::vector<double>(p, 0.0));

    for (std::size_t c = 0; c < k; ++c)
        st.log_priors[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));

    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < p; ++j) st.means[c][j] += features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < p; ++j) st.means[c][j] /= static_cast<double>(counts[c]);

    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - st.means[c][j];
            st.variances[c][j] += d * d;
        }
    }

    // variance floor keyed to the overall spread of each column; constant
    // columns would otherwise produce infinite log-likelihoods
    for (std::size_t j = 0; j < p; ++j) {
        const double mean_all = features.col(static_cast<Eigen::Index>(j)).mean();
        double var_all = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - mean_all;
            var_all += d * d;
        }
        var_all /= static_cast<double>(n);
        const double floor = 1e-9 * (var_all + 1.0);
        for (std::size_t c = 0; c < k; ++c) {
            st.variances[c][j] /= static_cast<double>(counts[c]);
            st.variances[c][j] = std::max(st.variances[c][j], floor);
        }
    }
    return st;
}

inline Semantics apply_nb_gauss(const NBGaussState& st, const Eigen::MatrixXd& features) {
    const auto n = static_cast<std::size_t>(features.rows());
    const auto p = static_cast<std::size_t>(features.cols());
    const std::size_t k = st.log_priors.size();
    if (p != st.means.front().size()) throw Error("apply_nb_gauss: column mismatch");

    std::vector<std::vector<double>> log_norm(k, std::vector<double>(p));
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < p; ++j)
            log_norm[c][j] = -0.5 * std::log(2.0 * std::numbers::pi * st.variances[c][j]);

    Semantics out;
    out.scores.assign(k, std::vector<double>(n, 0.0));
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            double v = st.log_priors[c];
            for (std::size_t j = 0; j < p; ++j) {
                const double d = features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - st.means[c][j];
                v += log_norm[c][j] - d * d / (2.0 * st.variances[c][j]);
            }
            out.scores[c][i] = v;
        }
    return out;
}

inline NBMultinomialState fit_nb_multinomial_state(const Eigen::MatrixXd& features, const std::vector<int>& labels, std::size_t k) {
    const auto n = static_cast<std::size_t>(features.rows());
    const auto p = static_cast<std::size_t>(features.cols());
    if (labels.size() != n) throw Error("fit_nb_multinomial: label count mismatch");
    const auto counts = detail::class_counts(labels, k);

    NBMultinomialState st;
    st.log_priors.resize(k);
    st.shift.resize(p);
    st.log_phi.assign(k, std::vector<double>(p, 0.0));

    for (std::size_t c = 0; c < k; ++c)
        st.log_priors[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
    for (std::size_t j = 0; j < p; ++j)
        st.shift[j] = features.col(static_cast<Eigen::Index>(j)).minCoeff();

    std::vector<std::vector<double>> event(k, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < p; ++j)
            event[c][j] += features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - st.shift[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        double total = 0.0;
        for (std::size_t j = 0; j < p; ++j) total += event[c][j];
        const double denom = total + static_cast<double>(p); // Laplace smoothing, alpha = 1
        for (std::size_t j = 0; j < p; ++j) st.log_phi[c][j] = std::log((event[c][j] + 1.0) / denom);
    }
    return st;
}

inline Semantics apply_nb_multinomial(const NBMultinomialState& st, const Eigen::MatrixXd& features) {
    const auto n = static_cast<std::size_t>(features.rows());
    const auto p = static_cast<std::size_t>(features.cols());
    const std::size_t k = st.log_priors.size();
    if (p != st.shift.size()) throw Error("apply_nb_multinomial: column mismatch");

    Semantics out;
    out.scores.assign(k, std::vector<double>(n, 0.0));
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            double v = st.log_priors[c];
            for (std::size_t j = 0; j < p; ++j)
                v += (features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - st.shift[j]) * st.log_phi[c][j];
            out.scores[c][i] = v;
        }
    return out;
}

inline NearestCentroidState fit_nearest_centroid_state(const Eigen::MatrixXd& features, const std::vector<int>& labels, std::size_t k) {
    const auto n = static_cast<std::size_t>(features.rows());
    const auto p = static_cast<std::size_t>(features.cols());
    if (labels.size() != n) throw Error("fit_nearest_centroid: label count mismatch");
    const auto counts = detail::class_counts(labels, k);

    NearestCentroidState st;
    st.centroids.assign(k, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < p; ++j)
            st.centroids[c][j] += features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < p; ++j) st.centroids[c][j] /= static_cast<double>(counts[c]);
    return st;
}

/// Negated Euclidean distance to each centroid, so argmax picks the
/// nearest one.
inline Semantics apply_nearest_centroid(const NearestCentroidState& st, const Eigen::MatrixXd& features) {
    const auto n = static_cast<std::size_t>(features.rows());
    const auto p = static_cast<std::size_t>(features.cols());
    const std::size_t k = st.centroids.size();
    if (p != st.centroids.front().size()) throw Error("apply_nearest_centroid: column mismatch");

    Semantics out;
    out.scores.assign(k, std::vector<double>(n, 0.0));
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < n; ++i) {
            double ss = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double d = features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - st.centroids[c][j];
                ss += d * d;
            }
            out.scores[c][i] = -std::sqrt(ss);
        }
    return out;
}

// fit-and-evaluate conveniences
inline Semantics fit_nb_gauss(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                              const Eigen::MatrixXd& eval_features, std::size_t k) {
    return apply_nb_gauss(fit_nb_gauss_state(features, labels, k), eval_features);
}

inline Semantics fit_nb_multinomial(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                    const Eigen::MatrixXd& eval_features, std::size_t k) {
    return apply_nb_multinomial(fit_nb_multinomial_state(features, labels, k), eval_features);
}

inline Semantics fit_nearest_centroid(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                                      const Eigen::MatrixXd& eval_features, std::size_t k) {
    return apply_nearest_centroid(fit_nearest_centroid_state(features, labels, k), eval_features);
}

// ---------------------------------------------------------------------------
// Nodes

using NodeId = std::uint32_t;
inline constexpr NodeId kInvalidNode = static_cast<NodeId>(-1);

/// One DAG vertex. Arguments always reference strictly smaller ids, so
/// ascending id order is a valid evaluation order.
struct Node {
    NodeId id = kInvalidNode;
    FunctionKind fn = FunctionKind::Terminal;
    std::vector<NodeId> args;
    int feature = -1; // input column for terminals

    std::vector<std::vector<double>> params; // [class][coefficient]
    ClassifierState classifier;

    Semantics train_semantics;
    Semantics val_semantics;
    std::vector<int> train_labels;
    BehaviorVector behavior;
    double fitness = 0.0;
    double val_fitness = 0.0;

    // population bookkeeping (children references + liveness + champion)
    std::uint32_t uses = 0;
    bool live = false;
    bool released = false;

    bool is_source() const { return args.empty(); }
};

using NodeStore = std::vector<Node>;

/// Everything a node evaluation needs from one evolution run: the two
/// halves as raw matrices, their labels, and the one-vs-rest targets of
/// the training half.
struct EvalContext {
    Eigen::MatrixXd train_X;
    Eigen::MatrixXd val_X;
    std::vector<int> train_labels;
    std::vector<int> val_labels;
    OvrTargets train_targets;
    std::size_t num_classes = 0;
    bool transform_intercept = true;
    bool protected_sqrt = false;
};

inline Eigen::MatrixXd to_matrix(const Dataset& ds) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(ds.rows), static_cast<Eigen::Index>(ds.cols));
    for (std::size_t i = 0; i < ds.rows; ++i)
        for (std::size_t j = 0; j < ds.cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ds.feature(i, j);
    return m;
}

inline EvalContext make_eval_context(const Dataset& train_half, const Dataset& val_half,
                                     bool transform_intercept = true, bool protected_sqrt = false) {
    if (train_half.num_classes() != val_half.num_classes()) throw Error("halves disagree on class catalog");
    EvalContext ctx;
    ctx.train_X = to_matrix(train_half);
    ctx.val_X = to_matrix(val_half);
    ctx.train_labels = train_half.labels;
    ctx.val_labels = val_half.labels;
    ctx.train_targets = ovr_targets(train_half);
    ctx.num_classes = train_half.num_classes();
    ctx.transform_intercept = transform_intercept;
    ctx.protected_sqrt = protected_sqrt;
    return ctx;
}

enum class EvalMode { Strict, Coerce };

namespace detail {

/// Elementwise transform inputs for one class: each argument contributes
/// its class-c column (its only column when it is single-output).
inline std::vector<const std::vector<double>*> class_columns(const std::vector<const Semantics*>& args, std::size_t c) {
    std::vector<const std::vector<double>*> cols;
    cols.reserve(args.size());
    for (const Semantics* a : args)
        cols.push_back(&a->scores[a->num_classes() == 1 ? 0 : c]);
    return cols;
}

inline std::vector<double> transform_raw(FunctionKind fn, const std::vector<const std::vector<double>*>& cols,
                                         bool protected_sqrt) {
    const std::size_t n = cols.front()->size();
    std::vector<double> raw(n);
    switch (fn) {
        case FunctionKind::Mul:
            for (std::size_t i = 0; i < n; ++i) {
                double v = 1.0;
                for (const auto* col : cols) v *= (*col)[i];
                raw[i] = v;
            }
            break;
        case FunctionKind::Max:
            for (std::size_t i = 0; i < n; ++i) {
                double v = (*cols[0])[i];
                for (std::size_t a = 1; a < cols.size(); ++a) v = std::max(v, (*cols[a])[i]);
                raw[i] = v;
            }
            break;
        case FunctionKind::Min:
            for (std::size_t i = 0; i < n; ++i) {
                double v = (*cols[0])[i];
                for (std::size_t a = 1; a < cols.size(); ++a) v = std::min(v, (*cols[a])[i]);
                raw[i] = v;
            }
            break;
        case FunctionKind::Sqrt:
            for (std::size_t i = 0; i < n; ++i) {
                const double x = (*cols[0])[i];
                raw[i] = std::sqrt(protected_sqrt ? std::abs(x) : x);
            }
            break;
        case FunctionKind::Abs:
            for (std::size_t i = 0; i < n; ++i) raw[i] = std::abs((*cols[0])[i]);
            break;
        case FunctionKind::Sin:
            for (std::size_t i = 0; i < n; ++i) raw[i] = std::sin((*cols[0])[i]);
            break;
        case FunctionKind::Tan:
            for (std::size_t i = 0; i < n; ++i) raw[i] = std::tan((*cols[0])[i]);
            break;
        case FunctionKind::Atan:
            for (std::size_t i = 0; i < n; ++i) raw[i] = std::atan((*cols[0])[i]);
            break;
        case FunctionKind::Tanh:
            for (std::size_t i = 0; i < n; ++i) raw[i] = std::tanh((*cols[0])[i]);
            break;
        case FunctionKind::Hypot:
            for (std::size_t i = 0; i < n; ++i) {
                const double a = (*cols[0])[i];
                const double b = (*cols[1])[i];
                raw[i] = std::sqrt(a * a + b * b);
            }
            break;
        default: throw Error("transform_raw: not a transform kind");
    }
    return raw;
}

} // namespace detail

/// Argument outputs (and the raw feature matrix for source nodes) a node
/// is evaluated against.
struct NodeInputs {
    const Eigen::MatrixXd* X = nullptr;
    std::vector<const Semantics*> args;
};

/// Evaluates a fitted node. Strict mode reports non-finite output as
/// nullopt; Coerce mode zeroes non-finite entries so deployed models are
/// total functions.
inline std::optional<Semantics> eval_node(const Node& node, const NodeInputs& in, EvalMode mode,
                                          bool protected_sqrt = false) {
    Semantics out;
    const std::size_t k = node.params.empty() ? 0 : node.params.size();

    if (node.fn == FunctionKind::Terminal) {
        const Eigen::MatrixXd& X = *in.X;
        const auto n = static_cast<std::size_t>(X.rows());
        out.scores.assign(node.params.size(), std::vector<double>(n, 0.0));
        for (std::size_t c = 0; c < node.params.size(); ++c) {
            const double theta = node.params[c][0];
            for (std::size_t i = 0; i < n; ++i)
                out.scores[c][i] = theta * X(static_cast<Eigen::Index>(i), node.feature);
        }
    } else if (node.fn == FunctionKind::Add) {
        const Eigen::MatrixXd design = feature_columns(in.args);
        out.scores.assign(k, {});
        for (std::size_t c = 0; c < k; ++c) {
            const Eigen::VectorXd coeffs = Eigen::Map<const Eigen::VectorXd>(
                node.params[c].data(), static_cast<Eigen::Index>(node.params[c].size()));
            const Eigen::VectorXd fitted = design * coeffs;
            out.scores[c].assign(fitted.data(), fitted.data() + fitted.size());
        }
    } else if (is_transform_kind(node.fn)) {
        const std::size_t n = in.args.front()->size();
        out.scores.assign(k, std::vector<double>(n, 0.0));
        for (std::size_t c = 0; c < k; ++c) {
            const auto cols = detail::class_columns(in.args, c);
            const auto raw = detail::transform_raw(node.fn, cols, protected_sqrt);
            const double slope = node.params[c][0];
            const double intercept = node.params[c].size() > 1 ? node.params[c][1] : 0.0;
            for (std::size_t i = 0; i < n; ++i) out.scores[c][i] = slope * raw[i] + intercept;
        }
    } else if (is_classifier_kind(node.fn)) {
        const Eigen::MatrixXd features = node.is_source() ? *in.X : feature_columns(in.args);
        if (std::holds_alternative<NBGaussState>(node.classifier))
            out = apply_nb_gauss(std::get<NBGaussState>(node.classifier), features);
        else if (std::holds_alternative<NBMultinomialState>(node.classifier))
            out = apply_nb_multinomial(std::get<NBMultinomialState>(node.classifier), features);
        else
            out = apply_nearest_centroid(std::get<NearestCentroidState>(node.classifier), features);
    } else {
        throw Error("eval_node: unknown kind");
    }

    if (mode == EvalMode::Coerce) {
        for (auto& col : out.scores)
            for (double& v : col)
                if (!std::isfinite(v)) v = 0.0;
        return out;
    }
    if (!out.all_finite()) return std::nullopt;
    return out;
}

// ---------------------------------------------------------------------------
// Fitting

struct FitResult {
    Semantics semantics;
    std::vector<std::vector<double>> params;
};

/// Linear combination of all argument columns, coefficients fitted by OLS
/// per class against the one-vs-rest targets.
inline std::optional<FitResult> eval_addition(const std::vector<const Semantics*>& args, const OvrTargets& targets) {
    if (args.size() < 2) throw Error("eval_addition: needs at least two arguments");
    const Eigen::MatrixXd design = feature_columns(args);
    if (!design.allFinite()) return std::nullopt;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    cod.compute(design);

    FitResult res;
    const std::size_t k = targets.num_classes();
    res.params.resize(k);
    res.semantics.scores.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(
            targets.targets[c].data(), static_cast<Eigen::Index>(targets.targets[c].size()));
        const Eigen::VectorXd coeffs = cod.solve(target);
        if (!coeffs.allFinite()) return std::nullopt;
        const Eigen::VectorXd fitted = design * coeffs;
        res.params[c].assign(coeffs.data(), coeffs.data() + coeffs.size());
        res.semantics.scores[c].assign(fitted.data(), fitted.data() + fitted.size());
    }
    if (!res.semantics.all_finite()) return std::nullopt;
    return res;
}

/// theta * f(args) per class, with an optional intercept. Domain
/// violations (square roots of negatives, overflow) discard the result
/// rather than clamping it.
inline std::optional<FitResult> eval_transform(FunctionKind fn, const std::vector<const Semantics*>& args,
                                               const OvrTargets& targets, bool with_intercept,
                                               bool protected_sqrt) {
    if (!is_transform_kind(fn)) throw Error("eval_transform: not a transform kind");
    const std::size_t n = args.front()->size();
    const std::size_t k = targets.num_classes();

    FitResult res;
    res.params.resize(k);
    res.semantics.scores.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const auto cols = detail::class_columns(args, c);
        const auto raw = detail::transform_raw(fn, cols, protected_sqrt);
        for (double v : raw)
            if (!std::isfinite(v)) return std::nullopt;

        const auto p = static_cast<Eigen::Index>(with_intercept ? 2 : 1);
        Eigen::MatrixXd design(static_cast<Eigen::Index>(n), p);
        for (std::size_t i = 0; i < n; ++i) {
            design(static_cast<Eigen::Index>(i), 0) = raw[i];
            if (with_intercept) design(static_cast<Eigen::Index>(i), 1) = 1.0;
        }
        const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(
            targets.targets[c].data(), static_cast<Eigen::Index>(targets.targets[c].size()));
        const auto ols = ols_fit(design, target);
        if (!ols.coefficients.allFinite()) return std::nullopt;
        res.params[c].assign(ols.coefficients.data(), ols.coefficients.data() + ols.coefficients.size());
        res.semantics.scores[c].assign(ols.fitted.data(), ols.fitted.data() + ols.fitted.size());
    }
    if (!res.semantics.all_finite()) return std::nullopt;
    return res;
}

namespace detail {

/// Computes both halves' semantics with frozen parameters, then fitness,
/// labels and behavior. nullopt when either half goes non-finite.
inline std::optional<Node> finish_node(Node node, const EvalContext& ctx, const NodeInputs& train_in,
                                       const NodeInputs& val_in) {
    auto train_sem = eval_node(node, train_in, EvalMode::Strict, ctx.protected_sqrt);
    if (!train_sem) return std::nullopt;
    auto val_sem = eval_node(node, val_in, EvalMode::Strict, ctx.protected_sqrt);
    if (!val_sem) return std::nullopt;

    node.train_semantics = std::move(*train_sem);
    node.val_semantics = std::move(*val_sem);
    node.train_labels = to_labels(node.train_semantics);
    node.fitness = macro_f1(ctx.train_labels, node.train_labels, ctx.num_classes);
    node.val_fitness = macro_f1(ctx.val_labels, to_labels(node.val_semantics), ctx.num_classes);
    node.behavior = behavior_vector(node.train_semantics, ctx.train_labels);
    return node;
}

} // namespace detail

/// Builds and fits a non-terminal node over population arguments.
/// Returns nullopt (a discard, not a fault) when fitting fails or the
/// semantics go non-finite on either half.
inline std::optional<Node> make_node(const EvalContext& ctx, const NodeStore& store, FunctionKind fn,
                                     std::vector<NodeId> arg_ids) {
    if (fn == FunctionKind::Terminal) throw Error("make_node: terminals are built from input columns");

    NodeInputs train_in, val_in;
    train_in.X = &ctx.train_X;
    val_in.X = &ctx.val_X;
    for (NodeId a : arg_ids) {
        const Node& arg = store.at(a);
        if (arg.released) throw Error("make_node: argument payload was pruned");
        train_in.args.push_back(&arg.train_semantics);
        val_in.args.push_back(&arg.val_semantics);
    }

    Node node;
    node.fn = fn;
    node.args = std::move(arg_ids);

    if (fn == FunctionKind::Add) {
        auto fit = eval_addition(train_in.args, ctx.train_targets);
        if (!fit) return std::nullopt;
        node.params = std::move(fit->params);
    } else if (is_transform_kind(fn)) {
        auto fit = eval_transform(fn, train_in.args, ctx.train_targets, ctx.transform_intercept, ctx.protected_sqrt);
        if (!fit) return std::nullopt;
        node.params = std::move(fit->params);
    } else if (is_classifier_kind(fn)) {
        const Eigen::MatrixXd features = feature_columns(train_in.args);
        if (!features.allFinite()) return std::nullopt;
        if (fn == FunctionKind::NBGauss)
            node.classifier = fit_nb_gauss_state(features, ctx.train_labels, ctx.num_classes);
        else if (fn == FunctionKind::NBMultinomial)
            node.classifier = fit_nb_multinomial_state(features, ctx.train_labels, ctx.num_classes);
        else
            node.classifier = fit_nearest_centroid_state(features, ctx.train_labels, ctx.num_classes);
    } else {
        throw Error("make_node: unknown kind");
    }

    return detail::finish_node(std::move(node), ctx, train_in, val_in);
}

/// theta_c * x_j per class with OLS-fit theta_c.
inline std::optional<Node> make_terminal_node(const EvalContext& ctx, int feature) {
    Node node;
    node.fn = FunctionKind::Terminal;
    node.feature = feature;

    Eigen::MatrixXd design = ctx.train_X.col(feature);
    node.params.resize(ctx.num_classes);
    for (std::size_t c = 0; c < ctx.num_classes; ++c) {
        const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(
            ctx.train_targets.targets[c].data(), static_cast<Eigen::Index>(ctx.train_targets.targets[c].size()));
        const auto ols = ols_fit(design, target);
        node.params[c] = {ols.coefficients(0)};
    }

    NodeInputs train_in, val_in;
    train_in.X = &ctx.train_X;
    val_in.X = &ctx.val_X;
    return detail::finish_node(std::move(node), ctx, train_in, val_in);
}

/// Classifier over the raw input columns; one of the seeded individuals.
inline std::optional<Node> make_raw_classifier_node(const EvalContext& ctx, FunctionKind fn) {
    if (!is_classifier_kind(fn)) throw Error("make_raw_classifier_node: not a classifier kind");
    Node node;
    node.fn = fn;
    if (fn == FunctionKind::NBGauss)
        node.classifier = fit_nb_gauss_state(ctx.train_X, ctx.train_labels, ctx.num_classes);
    else if (fn == FunctionKind::NBMultinomial)
        node.classifier = fit_nb_multinomial_state(ctx.train_X, ctx.train_labels, ctx.num_classes);
    else
        node.classifier = fit_nearest_centroid_state(ctx.train_X, ctx.train_labels, ctx.num_classes);

    NodeInputs train_in, val_in;
    train_in.X = &ctx.train_X;
    val_in.X = &ctx.val_X;
    return detail::finish_node(std::move(node), ctx, train_in, val_in);
}

} // namespace semgp
