#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semgp/dataset.hpp"
#include "semgp/error.hpp"
#include "semgp/evolution.hpp"
#include "semgp/selection.hpp"

namespace semgp {

inline constexpr int kModelFormatVersion = 1;

/// Bag of independently evolved models over 50% subsamples; prediction
/// averages the per-class scores.
struct EnsembleModel {
    std::vector<Model> models;
    std::vector<std::string> class_names;
    std::size_t num_features = 0;
    std::string scheme;
    std::vector<std::uint64_t> seeds;
    std::vector<double> validation_scores;
};

/// Trains n_models bags. Bag b runs evolve with seed base_seed + b, whose
/// internal 50/50 split realizes the bag's without-replacement subsample.
/// A failing bag is retried once with a disjoint seed; more than 20%
/// failing aborts.
inline EnsembleModel train_ensemble(const Dataset& ds, const EvolveConfig& cfg, std::size_t n_models,
                                    std::uint64_t base_seed, std::size_t jobs = 1) {
    if (n_models < 1) throw Error("train_ensemble: need at least one model");
    validate_config(cfg);

    std::atomic<std::size_t> retries{0};
    const std::size_t allowed_retries = n_models / 5; // at most 20% of the bags

    auto train_one = [&](std::size_t b) -> Model {
        EvolveConfig bag_cfg = cfg;
        bag_cfg.seed = base_seed + b + 1;
        try {
            return evolve(ds, bag_cfg);
        } catch (const Error&) {
            if (retries.fetch_add(1) + 1 > allowed_retries)
                throw Error("train_ensemble: too many failing bags for this dataset");
            bag_cfg.seed = base_seed + n_models + b + 1; // disjoint retry seed
            return evolve(ds, bag_cfg);
        }
    };

    std::vector<Model> models(n_models);
    if (jobs <= 1) {
        for (std::size_t b = 0; b < n_models; ++b) models[b] = train_one(b);
    } else {
        std::vector<std::future<Model>> futures(n_models);
        std::size_t next = 0;
        std::size_t running = 0;
        std::size_t done = 0;
        // sliding window keeps at most `jobs` bags in flight; results are
        // collected in bag order so the outcome is independent of timing
        while (done < n_models) {
            while (next < n_models && running < jobs) {
                futures[next] = std::async(std::launch::async, train_one, next);
                ++next;
                ++running;
            }
            futures[done].wait();
            models[done] = futures[done].get();
            ++done;
            --running;
        }
    }

    EnsembleModel em;
    em.models = std::move(models);
    em.class_names = ds.class_names;
    em.num_features = ds.cols;
    em.scheme = format_scheme(cfg.scheme);
    for (const Model& m : em.models) {
        em.seeds.push_back(m.seed);
        em.validation_scores.push_back(m.val_fitness);
    }
    return em;
}

/// Elementwise mean of the models' class scores, then argmax. The vote
/// flag switches to majority voting over predicted labels instead.
inline Prediction predict_ensemble(const EnsembleModel& em, const Eigen::MatrixXd& X, bool majority_vote = false) {
    if (em.models.empty()) throw Error("predict_ensemble: empty ensemble");
    if (static_cast<std::size_t>(X.cols()) != em.num_features)
        throw Error("predict: expected " + std::to_string(em.num_features) + " feature columns, got " +
                    std::to_string(static_cast<std::size_t>(X.cols())));

    const std::size_t k = em.class_names.size();
    const auto n = static_cast<std::size_t>(X.rows());

    Prediction out;
    out.scores.scores.assign(k, std::vector<double>(n, 0.0));
    for (const Model& m : em.models) {
        const Prediction p = predict(m, X);
        if (majority_vote) {
            for (std::size_t i = 0; i < n; ++i)
                out.scores.scores[static_cast<std::size_t>(p.labels[i])][i] += 1.0;
        } else {
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t i = 0; i < n; ++i) out.scores.scores[c][i] += p.scores.scores[c][i];
        }
    }
    if (!majority_vote) {
        const double inv = 1.0 / static_cast<double>(em.models.size());
        for (auto& col : out.scores.scores)
            for (double& v : col) v *= inv;
    }
    out.labels = n == 0 ? std::vector<int>{} : to_labels(out.scores);
    return out;
}

// ---------------------------------------------------------------------------
// Persistence (versioned JSON, lossless doubles)

namespace detail {

inline nlohmann::json classifier_to_json(const ClassifierState& st) {
    nlohmann::json j;
    if (const auto* g = std::get_if<NBGaussState>(&st)) {
        j["type"] = "nb_gauss";
        j["log_priors"] = g->log_priors;
        j["means"] = g->means;
        j["variances"] = g->variances;
    } else if (const auto* m = std::get_if<NBMultinomialState>(&st)) {
        j["type"] = "nb_multinomial";
        j["log_priors"] = m->log_priors;
        j["shift"] = m->shift;
        j["log_phi"] = m->log_phi;
    } else if (const auto* c = std::get_if<NearestCentroidState>(&st)) {
        j["type"] = "nearest_centroid";
        j["centroids"] = c->centroids;
    }
    return j;
}

inline ClassifierState classifier_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "nb_gauss") {
        NBGaussState st;
        st.log_priors = j.at("log_priors").get<std::vector<double>>();
        st.means = j.at("means").get<std::vector<std::vector<double>>>();
        st.variances = j.at("variances").get<std::vector<std::vector<double>>>();
        return st;
    }
    if (type == "nb_multinomial") {
        NBMultinomialState st;
        st.log_priors = j.at("log_priors").get<std::vector<double>>();
        st.shift = j.at("shift").get<std::vector<double>>();
        st.log_phi = j.at("log_phi").get<std::vector<std::vector<double>>>();
        return st;
    }
    if (type == "nearest_centroid") {
        NearestCentroidState st;
        st.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
        return st;
    }
    throw Error("model file: unknown classifier type '" + type + "'");
}

inline nlohmann::json model_to_json(const Model& m) {
    nlohmann::json j;
    j["seed"] = m.seed;
    j["validation_macro_f1"] = m.val_fitness;
    j["protected_sqrt"] = m.protected_sqrt;
    j["output"] = m.output;
    nlohmann::json nodes = nlohmann::json::array();
    for (const ModelNode& n : m.nodes) {
        nlohmann::json nj;
        nj["kind"] = std::string(kind_name(n.fn));
        if (!n.args.empty()) nj["args"] = n.args;
        if (n.fn == FunctionKind::Terminal) nj["feature"] = n.feature;
        if (!n.params.empty()) nj["params"] = n.params;
        if (!std::holds_alternative<std::monostate>(n.classifier)) nj["classifier"] = classifier_to_json(n.classifier);
        nodes.push_back(std::move(nj));
    }
    j["nodes"] = std::move(nodes);
    return j;
}

inline Model model_from_json(const nlohmann::json& j, std::size_t num_features,
                             const std::vector<std::string>& class_names) {
    Model m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.val_fitness = j.at("validation_macro_f1").get<double>();
    m.protected_sqrt = j.value("protected_sqrt", false);
    m.output = j.at("output").get<std::uint32_t>();
    m.num_features = num_features;
    m.class_names = class_names;

    const auto& nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw Error("model file: empty node list");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& nj = nodes[i];
        ModelNode n;
        const auto kind = kind_from_name(nj.at("kind").get<std::string>());
        if (!kind) throw Error("model file: unknown node kind");
        n.fn = *kind;
        if (nj.contains("args")) {
            n.args = nj.at("args").get<std::vector<std::uint32_t>>();
            for (std::uint32_t a : n.args)
                if (a >= i) throw Error("model file: node arguments must reference earlier nodes");
        }
        if (n.fn == FunctionKind::Terminal) {
            n.feature = nj.at("feature").get<int>();
            if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= num_features)
                throw Error("model file: terminal feature index out of range");
        }
        if (nj.contains("params")) n.params = nj.at("params").get<std::vector<std::vector<double>>>();
        if (nj.contains("classifier")) n.classifier = classifier_from_json(nj.at("classifier"));

        const bool needs_params = n.fn == FunctionKind::Terminal || n.fn == FunctionKind::Add || is_transform_kind(n.fn);
        if (needs_params && n.params.size() != class_names.size())
            throw Error("model file: parameter block does not match the class catalog");
        if (is_classifier_kind(n.fn) && std::holds_alternative<std::monostate>(n.classifier))
            throw Error("model file: classifier node without fitted state");
        m.nodes.push_back(std::move(n));
    }
    if (m.output >= m.nodes.size()) throw Error("model file: output index out of range");
    return m;
}

} // namespace detail

inline nlohmann::json ensemble_to_json(const EnsembleModel& em) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["scheme"] = em.scheme;
    j["class_names"] = em.class_names;
    j["num_features"] = em.num_features;
    nlohmann::json models = nlohmann::json::array();
    for (const Model& m : em.models) models.push_back(detail::model_to_json(m));
    j["models"] = std::move(models);
    return j;
}

inline EnsembleModel ensemble_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("format_version")) throw Error("model file: missing format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
        throw Error("model file: unsupported format version " + std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");

    EnsembleModel em;
    em.scheme = j.at("scheme").get<std::string>();
    em.class_names = j.at("class_names").get<std::vector<std::string>>();
    em.num_features = j.at("num_features").get<std::size_t>();
    if (em.class_names.size() < 2) throw Error("model file: needs at least two classes");
    if (em.num_features < 1) throw Error("model file: needs at least one feature");

    const auto& models = j.at("models");
    if (!models.is_array() || models.empty()) throw Error("model file: no models");
    for (const auto& mj : models) {
        Model m = detail::model_from_json(mj, em.num_features, em.class_names);
        em.seeds.push_back(m.seed);
        em.validation_scores.push_back(m.val_fitness);
        em.models.push_back(std::move(m));
    }
    return em;
}

/// Atomic write: serialize to a sibling temp file, then rename over.
inline void save_ensemble(const EnsembleModel& em, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << ensemble_to_json(em).dump(1, '\t') << '\n';
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline EnsembleModel load_ensemble(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("model file '" + path.string() + "' is corrupted: " + e.what());
    }
    try {
        return ensemble_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error("model file '" + path.string() + "' violates the schema: " + e.what());
    }
}

} // namespace semgp
