#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "semgp/dataset.hpp"
#include "semgp/error.hpp"
#include "semgp/nodes.hpp"
#include "semgp/rng.hpp"
#include "semgp/selection.hpp"

namespace semgp {

struct EvolveConfig {
    std::size_t population_size = 4000;
    std::size_t early_stop = 4000; // offspring evaluations without validation improvement
    SchemeConfig scheme;
    std::uint64_t seed = 1;
    std::vector<FunctionSpec> function_set = default_function_set();
    bool transform_intercept = true;
    bool protected_ops = false;

    int max_arity() const {
        int m = 0;
        for (const auto& f : function_set) m = std::max(m, f.arity);
        return m;
    }
};

inline void validate_config(const EvolveConfig& cfg) {
    if (cfg.function_set.empty()) throw Error("function set is empty");
    for (const auto& f : cfg.function_set) {
        if (f.kind == FunctionKind::Terminal) throw Error("terminals do not belong in the function set");
        const bool unary = default_arity(f.kind) == 1;
        if (unary && f.arity != 1) throw Error("unary function kind with non-unary arity");
        if (f.kind == FunctionKind::Hypot && f.arity != 2) throw Error("hypot takes exactly two arguments");
        if (f.kind == FunctionKind::Add && f.arity < 2) throw Error("addition needs at least two arguments");
        if (f.arity < 1) throw Error("bad arity for function kind");
    }
    if (cfg.population_size < static_cast<std::size_t>(cfg.max_arity()) + 1)
        throw Error("population size must exceed the largest function arity");
    if (cfg.early_stop < 1) throw Error("early_stop must be positive");
}

/// All individuals created during one run. Replaced nodes stay in the
/// store while anything live (or the validation champion) still references
/// them; unreachable payloads are pruned eagerly.
struct Population {
    EvalContext ctx;
    std::vector<std::string> class_names;
    NodeStore store;
    std::vector<NodeId> live;
    NodeId best_val = kInvalidNode;
    mutable std::uint64_t fitness_reads = 0;

    PopulationView view() const { return {&store, &live, &fitness_reads}; }

    double best_val_fitness() const { return best_val == kInvalidNode ? -1.0 : store[best_val].val_fitness; }

    // --- reference counting -------------------------------------------------

    void release_payload(NodeId id) {
        Node& n = store[id];
        n.released = true;
        Semantics().scores.swap(n.train_semantics.scores);
        Semantics().scores.swap(n.val_semantics.scores);
        std::vector<int>().swap(n.train_labels);
        std::vector<std::uint64_t>().swap(n.behavior.words);
        std::vector<std::vector<double>>().swap(n.params);
        n.classifier = std::monostate{};
    }

    void drop_use(NodeId id) {
        Node& n = store[id];
        --n.uses;
        if (n.uses == 0 && !n.live) {
            release_payload(id);
            for (NodeId a : n.args) drop_use(a);
        }
    }

    /// Appends a finished node; arguments must already be in the store.
    NodeId insert(Node node, bool make_live) {
        node.id = static_cast<NodeId>(store.size());
        for (NodeId a : node.args) {
            if (a >= node.id) throw Error("node arguments must reference earlier ids");
            ++store[a].uses;
        }
        node.live = make_live;
        node.uses = make_live ? 1u : 0u;
        const NodeId id = node.id;
        store.push_back(std::move(node));
        if (make_live) live.push_back(id);
        maybe_update_best(id);
        return id;
    }

    void maybe_update_best(NodeId id) {
        if (best_val != kInvalidNode && !(store[id].val_fitness > store[best_val].val_fitness)) return;
        const NodeId old = best_val;
        best_val = id;
        ++store[id].uses;
        if (old != kInvalidNode) drop_use(old);
    }

    /// Steady-state replacement: victim leaves the live set, the offspring
    /// takes its slot and is immediately selectable.
    void replace(NodeId victim, NodeId offspring) {
        auto it = std::find(live.begin(), live.end(), victim);
        if (it == live.end()) throw Error("replace: victim is not live");
        *it = offspring;
        store[victim].live = false;
        drop_use(victim);
    }
};

/// Seeds the population with one scaled terminal per input plus the three
/// raw-feature classifiers, then fills to size with uniformly built random
/// nodes. Discarded candidates are retried within a bounded budget.
inline Population init_population(const Dataset& train_half, const Dataset& val_half, const EvolveConfig& cfg,
                                  Rng& rng) {
    validate_config(cfg);
    if (!has_all_classes(train_half)) throw Error("a class is missing from the training half");

    Population pop;
    pop.ctx = make_eval_context(train_half, val_half, cfg.transform_intercept, cfg.protected_ops);
    pop.class_names = train_half.class_names;
    pop.store.reserve(cfg.population_size * 2);

    const std::size_t m = train_half.cols;
    const std::size_t seeded = m + 3;
    if (cfg.population_size < seeded)
        throw Error("population size smaller than the " + std::to_string(seeded) + " seeded individuals");

    for (std::size_t j = 0; j < m; ++j) {
        auto node = make_terminal_node(pop.ctx, static_cast<int>(j));
        if (!node) throw Error("terminal seeding failed on column " + std::to_string(j));
        pop.insert(std::move(*node), true);
    }
    for (FunctionKind k : {FunctionKind::NBGauss, FunctionKind::NBMultinomial, FunctionKind::NearestCentroid}) {
        auto node = make_raw_classifier_node(pop.ctx, k);
        if (!node) throw Error("classifier seeding failed");
        pop.insert(std::move(*node), true);
    }

    const std::size_t budget = 100 * cfg.population_size;
    std::size_t attempts = 0;
    while (pop.live.size() < cfg.population_size) {
        if (++attempts > budget) throw Error("initialization failed: retry budget exhausted");
        // only kinds whose arity fits the population built so far
        std::vector<const FunctionSpec*> eligible;
        for (const auto& f : cfg.function_set)
            if (static_cast<std::size_t>(f.arity) <= pop.live.size()) eligible.push_back(&f);
        if (eligible.empty()) throw Error("initialization failed: no function kind fits the seeded population");
        const FunctionSpec& spec = *eligible[rng.index(eligible.size())];

        IdSet exclude;
        std::vector<NodeId> args;
        const auto view = pop.view();
        for (int a = 0; a < spec.arity; ++a) {
            const auto drawn = detail::draw_candidates(view, 1, exclude, rng).front();
            args.push_back(drawn);
            exclude.push_back(drawn);
        }
        auto node = make_node(pop.ctx, pop.store, spec.kind, std::move(args));
        if (!node) continue;
        pop.insert(std::move(*node), true);
    }
    return pop;
}

enum class StepOutcome { Created, Discarded };

/// One steady-state transaction: draw a function, select parents, fit the
/// offspring, and swap it for a negatively selected individual. A discard
/// leaves the population unchanged but still costs one evaluation.
inline StepOutcome evolve_step(Population& pop, const EvolveConfig& cfg, Rng& rng) {
    const FunctionSpec& spec = cfg.function_set[rng.index(cfg.function_set.size())];
    const auto view = pop.view();
    auto args = select_arguments(spec.kind, spec.arity, view, cfg.scheme, pop.ctx.train_targets, rng);
    auto node = make_node(pop.ctx, pop.store, spec.kind, std::move(args));
    if (!node) return StepOutcome::Discarded;

    const NodeId victim = negative_select(view, cfg.scheme, rng);
    const NodeId id = pop.insert(std::move(*node), false);
    pop.store[id].live = true;
    pop.store[id].uses += 1; // liveness counts as a use
    pop.replace(victim, id);
    return StepOutcome::Created;
}

/// Pruned sub-DAG of the validation champion with frozen parameters,
/// evaluable on any matrix with the right number of columns.
struct ModelNode {
    FunctionKind fn = FunctionKind::Terminal;
    std::vector<std::uint32_t> args; // indices into Model::nodes
    int feature = -1;
    std::vector<std::vector<double>> params;
    ClassifierState classifier;
};

struct Model {
    std::vector<ModelNode> nodes; // topologically ordered
    std::uint32_t output = 0;
    std::vector<std::string> class_names;
    std::size_t num_features = 0;
    double val_fitness = 0.0;
    std::uint64_t seed = 0;
    bool protected_sqrt = false;
};

inline Model extract_model(const Population& pop) {
    if (pop.best_val == kInvalidNode) throw Error("extract_model: no champion recorded");

    // collect the reachable set
    std::vector<NodeId> stack{pop.best_val};
    std::vector<bool> seen(pop.store.size(), false);
    seen[pop.best_val] = true;
    std::vector<NodeId> reach;
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        reach.push_back(id);
        for (NodeId a : pop.store[id].args)
            if (!seen[a]) {
                seen[a] = true;
                stack.push_back(a);
            }
    }
    std::sort(reach.begin(), reach.end()); // ascending ids are a topological order

    std::vector<std::uint32_t> remap(pop.store.size(), 0);
    Model model;
    model.nodes.reserve(reach.size());
    for (NodeId id : reach) {
        const Node& n = pop.store[id];
        if (n.released) throw Error("extract_model: reachable node was pruned");
        remap[id] = static_cast<std::uint32_t>(model.nodes.size());
        ModelNode mn;
        mn.fn = n.fn;
        mn.feature = n.feature;
        mn.params = n.params;
        mn.classifier = n.classifier;
        for (NodeId a : n.args) mn.args.push_back(remap[a]);
        model.nodes.push_back(std::move(mn));
    }
    model.output = remap[pop.best_val];
    model.class_names = pop.class_names;
    model.num_features = static_cast<std::size_t>(pop.ctx.train_X.cols());
    model.val_fitness = pop.store[pop.best_val].val_fitness;
    model.protected_sqrt = pop.ctx.protected_sqrt;
    return model;
}

struct Prediction {
    Semantics scores;
    std::vector<int> labels;
};

/// Evaluates the frozen DAG bottom-up. Non-finite intermediate values are
/// coerced to zero so prediction is total on unseen data.
inline Prediction predict(const Model& model, const Eigen::MatrixXd& X) {
    if (static_cast<std::size_t>(X.cols()) != model.num_features)
        throw Error("predict: expected " + std::to_string(model.num_features) + " feature columns, got " +
                    std::to_string(static_cast<std::size_t>(X.cols())));

    std::vector<Semantics> outputs(model.nodes.size());
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
        const ModelNode& mn = model.nodes[i];
        Node shim; // reuse the node evaluator on the frozen record
        shim.fn = mn.fn;
        shim.feature = mn.feature;
        shim.params = mn.params;
        shim.classifier = mn.classifier;
        NodeInputs in;
        in.X = &X;
        for (std::uint32_t a : mn.args) {
            shim.args.push_back(a);
            in.args.push_back(&outputs[a]);
        }
        outputs[i] = *eval_node(shim, in, EvalMode::Coerce, model.protected_sqrt);
    }

    Prediction pred;
    pred.scores = std::move(outputs[model.output]);
    pred.labels = to_labels(pred.scores);
    return pred;
}

/// Full run: internal 50/50 split (re-drawn with stepped seeds while a
/// class is missing from the training half), initialization, then
/// steady-state steps until early stopping fires.
inline Model evolve(const Dataset& train_ds, const EvolveConfig& cfg) {
    validate_config(cfg);
    if (train_ds.rows < 4) throw Error("evolve: needs at least four samples");
    if (!has_all_classes(train_ds)) throw Error("evolve: a class is missing from the dataset");

    std::optional<std::pair<Dataset, Dataset>> halves;
    for (std::uint64_t attempt = 0; attempt < 10; ++attempt) {
        auto parts = random_split(train_ds, 0.5, cfg.seed + attempt);
        if (has_all_classes(parts.first)) {
            halves = std::move(parts);
            break;
        }
    }
    if (!halves) throw Error("evolve: could not draw a training half with all classes in 10 attempts");

    Rng rng(cfg.seed);
    Population pop = init_population(halves->first, halves->second, cfg, rng);

    std::size_t stagnation = 0;
    while (stagnation < cfg.early_stop) {
        const double before = pop.best_val_fitness();
        evolve_step(pop, cfg, rng);
        if (pop.best_val_fitness() > before)
            stagnation = 0;
        else
            ++stagnation;
    }
    Model model = extract_model(pop);
    model.seed = cfg.seed;
    return model;
}

} // namespace semgp
