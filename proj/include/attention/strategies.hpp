#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "attention/model.hpp"

namespace attention {

enum class StrategyKind { Novelty, Popularity, Greedy, Weighted };

/// Index policy: a rule mapping story state (N_t, t) to a scalar index.
/// Stories are displayed in descending index order.
struct IndexStrategy {
    StrategyKind kind = StrategyKind::Novelty;
    double weight = 0.6;  // used only by Weighted

    static IndexStrategy novelty() { return {StrategyKind::Novelty, 0.6}; }
    static IndexStrategy popularity() { return {StrategyKind::Popularity, 0.6}; }
    static IndexStrategy greedy() { return {StrategyKind::Greedy, 0.6}; }
    static IndexStrategy weighted(double w) {
        if (!(w > 0.0))
            throw std::invalid_argument("IndexStrategy: weight must be positive");
        return {StrategyKind::Weighted, w};
    }

    /// Accepts `novelty`, `popularity`, `greedy`, `weighted:<w>`.
    static IndexStrategy parse(const std::string& name) {
        if (name == "novelty")
            return novelty();
        if (name == "popularity")
            return popularity();
        if (name == "greedy")
            return greedy();
        if (name == "weighted")
            return weighted(0.6);
        if (name.rfind("weighted:", 0) == 0) {
            try {
                return weighted(std::stod(name.substr(9)));
            } catch (const std::invalid_argument&) {
            }
        }
        throw std::invalid_argument("unknown strategy '" + name + "'");
    }

    std::string name() const {
        switch (kind) {
            case StrategyKind::Novelty: return "novelty";
            case StrategyKind::Popularity: return "popularity";
            case StrategyKind::Greedy: return "greedy";
            case StrategyKind::Weighted: return "weighted:" + std::to_string(weight);
        }
        return "?";
    }
};

/// Index value of one story under the given strategy at time `now`.
inline double index_value(const IndexStrategy& strategy, const StoryState& story,
                          const DecayLaw& decay, double now) {
    const double t = story.lifetime(now);
    switch (strategy.kind) {
        case StrategyKind::Novelty:
            return -t;
        case StrategyKind::Popularity:
            return story.diggs;
        case StrategyKind::Greedy:
            return story.diggs * novelty(decay, t);
        case StrategyKind::Weighted:
            // w*ln N + ln r = w*ln N - alpha * t^beta
            return strategy.weight * std::log(story.diggs) +
                   (t == 0.0 ? 0.0 : -decay.alpha * std::pow(t, decay.beta));
    }
    throw std::logic_error("index_value: bad strategy kind");
}

/// Sort stories descending by index; ties broken by descending id
/// (more recently created first). Deterministic permutation of the input.
inline std::vector<StoryState> rank(const std::vector<StoryState>& stories,
                                    const IndexStrategy& strategy,
                                    const DecayLaw& decay, double now) {
    if (stories.empty())
        throw std::invalid_argument("rank: empty story list");
    std::unordered_set<std::uint64_t> ids;
    for (const auto& s : stories)
        if (!ids.insert(s.id).second)
            throw std::invalid_argument("rank: duplicate story id " + std::to_string(s.id));
    std::vector<StoryState> out = stories;
    std::sort(out.begin(), out.end(), [&](const StoryState& a, const StoryState& b) {
        const double ia = index_value(strategy, a, decay, now);
        const double ib = index_value(strategy, b, decay, now);
        if (ia != ib)
            return ia > ib;
        return a.id > b.id;
    });
    return out;
}

/// Id of the story with the lowest index; ties broken by ascending id
/// (oldest dropped). A just-inserted story may be the one returned.
inline std::uint64_t evict_lowest(const std::vector<StoryState>& stories,
                                  const IndexStrategy& strategy,
                                  const DecayLaw& decay, double now) {
    if (stories.empty())
        throw std::invalid_argument("evict_lowest: empty story list");
    const StoryState* worst = &stories.front();
    double worst_index = index_value(strategy, *worst, decay, now);
    for (const auto& s : stories) {
        const double v = index_value(strategy, s, decay, now);
        if (v < worst_index || (v == worst_index && s.id < worst->id)) {
            worst = &s;
            worst_index = v;
        }
    }
    return worst->id;
}

}  // namespace attention
