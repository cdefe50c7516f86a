#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semgp/error.hpp"
#include "semgp/nodes.hpp"
#include "semgp/rng.hpp"
#include "semgp/semantics.hpp"

namespace semgp {

enum class ParentScheme { Fit, Rnd, Sim, Prs, Agr, Ads, Nvs };
enum class NegativeScheme { Fit, Rnd };
enum class FirstArgScheme { Rnd, Fit };

/// Full selection-scheme descriptor. The string form is
/// `<parent>-<negative>[*][--<first>]`, e.g. "agr-rnd", "prs-fit*",
/// "ads-rnd--rnd". The trailing-star spelling "ads-rnd--rnd*" is accepted
/// too. The first-argument scheme defaults to rnd for sim/prs/agr and to
/// fit for ads.
struct SchemeConfig {
    ParentScheme parent = ParentScheme::Fit;
    NegativeScheme negative = NegativeScheme::Fit;
    FirstArgScheme first_arg = FirstArgScheme::Rnd;
    bool all_functions = false;
    int tournament_size = 2;
    int novelty_k = 15;

    bool operator==(const SchemeConfig&) const = default;
};

inline bool parent_uses_heuristic(ParentScheme p) {
    return p == ParentScheme::Sim || p == ParentScheme::Prs || p == ParentScheme::Agr || p == ParentScheme::Ads;
}

namespace detail {

inline std::string_view parent_name(ParentScheme p) {
    switch (p) {
        case ParentScheme::Fit: return "fit";
        case ParentScheme::Rnd: return "rnd";
        case ParentScheme::Sim: return "sim";
        case ParentScheme::Prs: return "prs";
        case ParentScheme::Agr: return "agr";
        case ParentScheme::Ads: return "ads";
        case ParentScheme::Nvs: return "nvs";
    }
    return "?";
}

inline std::optional<ParentScheme> parent_from(std::string_view s) {
    for (ParentScheme p : {ParentScheme::Fit, ParentScheme::Rnd, ParentScheme::Sim, ParentScheme::Prs,
                           ParentScheme::Agr, ParentScheme::Ads, ParentScheme::Nvs})
        if (parent_name(p) == s) return p;
    return std::nullopt;
}

inline FirstArgScheme default_first_arg(ParentScheme p) {
    return p == ParentScheme::Ads ? FirstArgScheme::Fit : FirstArgScheme::Rnd;
}

} // namespace detail

inline SchemeConfig parse_scheme(std::string_view text) {
    std::string s(text);
    SchemeConfig cfg;

    bool star = false;
    if (!s.empty() && s.back() == '*') { // trailing-star spelling
        star = true;
        s.pop_back();
    }

    std::string first_part;
    if (auto pos = s.find("--"); pos != std::string::npos) {
        first_part = s.substr(pos + 2);
        s = s.substr(0, pos);
    }
    if (!s.empty() && s.back() == '*') {
        star = true;
        s.pop_back();
    }

    const auto dash = s.find('-');
    if (dash == std::string::npos) throw Error("bad scheme '" + std::string(text) + "': expected <parent>-<negative>");
    const auto parent = detail::parent_from(s.substr(0, dash));
    if (!parent) throw Error("bad scheme '" + std::string(text) + "': unknown parent selection");
    cfg.parent = *parent;

    const std::string neg = s.substr(dash + 1);
    if (neg == "fit")
        cfg.negative = NegativeScheme::Fit;
    else if (neg == "rnd")
        cfg.negative = NegativeScheme::Rnd;
    else
        throw Error("bad scheme '" + std::string(text) + "': unknown negative selection");

    if (star && !parent_uses_heuristic(cfg.parent))
        throw Error("bad scheme '" + std::string(text) + "': '*' applies to sim/prs/agr/ads only");
    cfg.all_functions = star;

    cfg.first_arg = detail::default_first_arg(cfg.parent);
    if (!first_part.empty()) {
        if (!parent_uses_heuristic(cfg.parent))
            throw Error("bad scheme '" + std::string(text) + "': '--' applies to sim/prs/agr/ads only");
        if (first_part == "rnd")
            cfg.first_arg = FirstArgScheme::Rnd;
        else if (first_part == "fit")
            cfg.first_arg = FirstArgScheme::Fit;
        else
            throw Error("bad scheme '" + std::string(text) + "': unknown first-argument selection");
    }
    return cfg;
}

inline std::string format_scheme(const SchemeConfig& cfg) {
    std::string s(detail::parent_name(cfg.parent));
    s += '-';
    s += cfg.negative == NegativeScheme::Fit ? "fit" : "rnd";
    if (cfg.all_functions) s += '*';
    if (parent_uses_heuristic(cfg.parent) && cfg.first_arg != detail::default_first_arg(cfg.parent))
        s += cfg.first_arg == FirstArgScheme::Fit ? "--fit" : "--rnd";
    return s;
}

/// Whether the parent heuristic drives argument selection for this
/// function kind: by default only for the functions that motivated the
/// heuristics (addition and the embedded classifiers), with the '*'
/// variant extending it to every kind taking two or more arguments.
inline bool heuristic_applies(const SchemeConfig& cfg, FunctionKind fn, int arity) {
    if (cfg.all_functions) return arity >= 2;
    return fn == FunctionKind::Add || is_classifier_kind(fn);
}

/// Read-only window over the live population that selection operates on.
/// Fitness is read through fitness_of so tests can check which schemes
/// touch it.
struct PopulationView {
    const NodeStore* store = nullptr;
    const std::vector<NodeId>* live = nullptr;
    std::uint64_t* fitness_reads = nullptr;

    std::size_t size() const { return live->size(); }
    NodeId at(std::size_t i) const { return (*live)[i]; }
    const Node& node(NodeId id) const { return (*store)[id]; }

    double fitness_of(NodeId id) const {
        if (fitness_reads) ++*fitness_reads;
        return (*store)[id].fitness;
    }
};

using IdSet = std::vector<NodeId>; // small, linear membership is fine

namespace detail {

inline bool contains(const IdSet& set, NodeId id) {
    return std::find(set.begin(), set.end(), id) != set.end();
}

/// Up to `count` distinct live ids outside `exclude`, drawn uniformly.
/// Throws when nothing is eligible.
inline std::vector<NodeId> draw_candidates(const PopulationView& pop, std::size_t count, const IdSet& exclude,
                                           Rng& rng) {
    const std::size_t n = pop.size();
    std::size_t excluded_live = 0;
    for (NodeId id : exclude)
        if (pop.node(id).live) ++excluded_live;
    const std::size_t eligible = n - excluded_live;
    if (eligible == 0) throw Error("selection: no eligible candidate");
    const std::size_t want = std::min(count, eligible);

    std::vector<NodeId> drawn;
    drawn.reserve(want);
    if ((want + exclude.size()) * 4 >= n) {
        // tight case: enumerate the eligible ids and partially shuffle
        std::vector<NodeId> pool;
        pool.reserve(eligible);
        for (std::size_t i = 0; i < n; ++i)
            if (!contains(exclude, pop.at(i))) pool.push_back(pop.at(i));
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j = i + rng.index(pool.size() - i);
            std::swap(pool[i], pool[j]);
            drawn.push_back(pool[i]);
        }
    } else {
        while (drawn.size() < want) {
            const NodeId id = pop.at(rng.index(n));
            if (contains(exclude, id) || contains(drawn, id)) continue;
            drawn.push_back(id);
        }
    }
    return drawn;
}

} // namespace detail

enum class TournamentDirection { Best, Worst };

/// Classic fitness tournament. Ties break toward the older (lower-id)
/// individual; a population smaller than the tournament draws what it has.
inline NodeId tournament_by_fitness(const PopulationView& pop, int size, Rng& rng, TournamentDirection direction,
                                    const IdSet& exclude = {}) {
    if (size < 1) throw Error("tournament size must be positive");
    const auto drawn = detail::draw_candidates(pop, static_cast<std::size_t>(size), exclude, rng);
    NodeId winner = drawn.front();
    double winner_fit = pop.fitness_of(winner);
    for (std::size_t i = 1; i < drawn.size(); ++i) {
        const double f = pop.fitness_of(drawn[i]);
        const bool better = direction == TournamentDirection::Best
                                ? (f > winner_fit || (f == winner_fit && drawn[i] < winner))
                                : (f < winner_fit || (f == winner_fit && drawn[i] < winner));
        if (better) {
            winner = drawn[i];
            winner_fit = f;
        }
    }
    return winner;
}

inline NodeId select_first_argument(const PopulationView& pop, const SchemeConfig& cfg, Rng& rng) {
    if (cfg.first_arg == FirstArgScheme::Fit)
        return tournament_by_fitness(pop, cfg.tournament_size, rng, TournamentDirection::Best);
    return pop.at(rng.index(pop.size()));
}

namespace detail {

/// Generic scored tournament: undefined scores lose to any defined one,
/// value ties keep the earlier draw (which makes an all-tied tournament a
/// uniform pick, since candidates were drawn uniformly).
template <typename ScoreFn>
inline NodeId scored_tournament(const PopulationView& pop, const SchemeConfig& cfg, Rng& rng, const IdSet& exclude,
                                bool maximize, ScoreFn&& score_of) {
    const auto drawn = draw_candidates(pop, static_cast<std::size_t>(cfg.tournament_size), exclude, rng);
    NodeId winner = drawn.front();
    std::optional<double> winner_score = score_of(winner);
    for (std::size_t i = 1; i < drawn.size(); ++i) {
        const std::optional<double> s = score_of(drawn[i]);
        if (!s) continue;
        const bool better = !winner_score || (maximize ? *s > *winner_score : *s < *winner_score);
        if (better) {
            winner = drawn[i];
            winner_score = s;
        }
    }
    return winner;
}

} // namespace detail

enum class HeuristicMeasure { Cosine, Pearson, Agreement };

/// Tournament that minimizes similarity to the anchor (the first argument
/// already chosen). Candidates with undefined similarity lose.
inline NodeId select_argument_similarity(const PopulationView& pop, const Node& anchor, HeuristicMeasure measure,
                                         const SchemeConfig& cfg, Rng& rng, const IdSet& exclude) {
    return detail::scored_tournament(pop, cfg, rng, exclude, /*maximize=*/false, [&](NodeId id) -> std::optional<double> {
        const Node& cand = pop.node(id);
        switch (measure) {
            case HeuristicMeasure::Cosine:
                return mean_abs_similarity(cand.train_semantics, anchor.train_semantics, SimilarityMeasure::Cosine);
            case HeuristicMeasure::Pearson:
                return mean_abs_similarity(cand.train_semantics, anchor.train_semantics, SimilarityMeasure::Pearson);
            case HeuristicMeasure::Agreement:
                return agreement(cand.train_labels, anchor.train_labels);
        }
        return std::nullopt;
    });
}

/// Tournament that maximizes the mean relative angle between the error
/// vectors of candidate and anchor; degenerate error vectors lose.
inline NodeId select_argument_ads(const PopulationView& pop, const Node& anchor, const OvrTargets& targets,
                                  const SchemeConfig& cfg, Rng& rng, const IdSet& exclude) {
    return detail::scored_tournament(pop, cfg, rng, exclude, /*maximize=*/true, [&](NodeId id) {
        return mean_relative_angle(targets, anchor.train_semantics, pop.node(id).train_semantics);
    });
}

/// Tournament that maximizes sparseness of the candidate's correctness
/// behavior against the whole live population.
inline NodeId select_argument_novelty(const PopulationView& pop, const SchemeConfig& cfg, Rng& rng,
                                      const IdSet& exclude) {
    std::vector<std::reference_wrapper<const BehaviorVector>> archive;
    archive.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) archive.emplace_back(pop.node(pop.at(i)).behavior);
    return detail::scored_tournament(pop, cfg, rng, exclude, /*maximize=*/true, [&](NodeId id) -> std::optional<double> {
        return novelty_score(pop.node(id).behavior, archive, static_cast<std::size_t>(cfg.novelty_k));
    });
}

/// Chooses `arity` distinct parents for the function being built. The
/// similarity heuristics anchor every later argument to the first one and
/// only act on the kinds they were designed for; elsewhere the draw is
/// uniform.
inline std::vector<NodeId> select_arguments(FunctionKind fn, int arity, const PopulationView& pop,
                                            const SchemeConfig& cfg, const OvrTargets& targets, Rng& rng) {
    if (pop.size() < static_cast<std::size_t>(arity)) throw Error("population smaller than function arity");

    std::vector<NodeId> args;
    args.reserve(static_cast<std::size_t>(arity));
    IdSet exclude;

    const bool heuristic = parent_uses_heuristic(cfg.parent) && heuristic_applies(cfg, fn, arity);

    for (int a = 0; a < arity; ++a) {
        NodeId pick = kInvalidNode;
        if (cfg.parent == ParentScheme::Fit) {
            pick = tournament_by_fitness(pop, cfg.tournament_size, rng, TournamentDirection::Best, exclude);
        } else if (cfg.parent == ParentScheme::Nvs) {
            pick = select_argument_novelty(pop, cfg, rng, exclude);
        } else if (heuristic) {
            if (a == 0) {
                pick = select_first_argument(pop, cfg, rng);
            } else {
                const Node& anchor = pop.node(args.front());
                switch (cfg.parent) {
                    case ParentScheme::Sim:
                        pick = select_argument_similarity(pop, anchor, HeuristicMeasure::Cosine, cfg, rng, exclude);
                        break;
                    case ParentScheme::Prs:
                        pick = select_argument_similarity(pop, anchor, HeuristicMeasure::Pearson, cfg, rng, exclude);
                        break;
                    case ParentScheme::Agr:
                        pick = select_argument_similarity(pop, anchor, HeuristicMeasure::Agreement, cfg, rng, exclude);
                        break;
                    case ParentScheme::Ads:
                        pick = select_argument_ads(pop, anchor, targets, cfg, rng, exclude);
                        break;
                    default: break;
                }
            }
        } else {
            // rnd parent scheme, or a kind outside the heuristic's set
            pick = detail::draw_candidates(pop, 1, exclude, rng).front();
        }
        args.push_back(pick);
        exclude.push_back(pick);
    }
    return args;
}

/// Picks the live individual the offspring will replace.
inline NodeId negative_select(const PopulationView& pop, const SchemeConfig& cfg, Rng& rng) {
    if (cfg.negative == NegativeScheme::Fit)
        return tournament_by_fitness(pop, cfg.tournament_size, rng, TournamentDirection::Worst);
    return pop.at(rng.index(pop.size()));
}

} // namespace semgp
