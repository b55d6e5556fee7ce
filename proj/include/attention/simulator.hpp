#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "attention/model.hpp"
#include "attention/strategies.hpp"

namespace attention {

/// Full experiment parameterization. Defaults are the digg.com calibration.
struct SimConfig {
    std::size_t slots = 15;
    double step_minutes = 5.0;
    // mean minutes between story arrivals; infinity disables arrivals
    double arrival_interval_minutes = 20.0;
    std::uint64_t steps = 100000;
    DecayLaw decay{0.4, 0.4};
    NoiseLaw noise{0.5};
    PositionProfile positions = PositionProfile::digg_default();
    IndexStrategy strategy = IndexStrategy::novelty();
    std::uint64_t seed = 0;
    bool record_per_step_totals = false;

    void validate() const {
        if (slots == 0)
            throw std::invalid_argument("SimConfig: slots must be >= 1");
        if (slots != positions.slots())
            throw std::invalid_argument("SimConfig: slots must match position profile length");
        if (!(step_minutes > 0.0))
            throw std::invalid_argument("SimConfig: step_minutes must be positive");
        if (!(arrival_interval_minutes > 0.0))
            throw std::invalid_argument("SimConfig: arrival interval must be positive");
    }
};

/// Accumulated results of one run. total_diggs counts growth increments
/// only, not the 1-digg seeds each story starts with.
struct RunSummary {
    double total_diggs = 0.0;
    std::uint64_t stories_created = 0;
    std::optional<std::vector<double>> per_step_totals;
    std::vector<StoryState> final_page;
};

namespace detail {

/// Deterministic draws on top of mt19937_64. Normal by Box-Muller
/// (no caching, two uniforms per draw), Poisson by inversion, so a
/// run is bit-reproducible from the seed.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {  // (0, 1]
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal(double mean, double std) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(2.0 * std::numbers::pi * u2);
        return mean + std * z;
    }

    std::uint64_t poisson(double lambda) {
        if (!(lambda > 0.0))
            return 0;
        const double limit = std::exp(-lambda);
        std::uint64_t k = 0;
        double p = uniform01();
        while (p > limit) {
            p *= uniform01();
            ++k;
        }
        return k;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace detail

/// Mutable state threaded through steps of one run.
struct SimState {
    std::vector<StoryState> stories;
    double now = 0.0;
    std::uint64_t next_id = 1;
    double total = 0.0;
    std::uint64_t stories_created = 0;
    std::vector<double> per_step_totals;
    detail::SimRng rng{0};
};

/// m stories, ids 1..m, each starting with 1 digg and lifetime 0.
inline SimState init(const SimConfig& config) {
    config.validate();
    SimState state;
    state.rng = detail::SimRng(config.seed);
    state.stories.reserve(config.slots);
    for (std::size_t i = 0; i < config.slots; ++i)
        state.stories.push_back({state.next_id++, 1.0, 0.0});
    state.stories_created = config.slots;
    return state;
}

/// One simulation step: rank, grow each slot, then Poisson arrivals each
/// followed by one eviction, keeping the pool at m.
inline void step(SimState& state, const SimConfig& config) {
    if (state.stories.size() != config.slots)
        throw std::logic_error("step: story pool size mismatch");
    const double dt = config.step_minutes;

    // growth under the current ranking
    auto page = rank(state.stories, config.strategy, config.decay, state.now);
    double step_total = 0.0;
    for (std::size_t slot = 0; slot < page.size(); ++slot) {
        StoryState& story = page[slot];
        const double r = novelty(config.decay, story.lifetime(state.now));
        const double x = state.rng.normal(NoiseLaw::mean, config.noise.std);
        const double dn = growth_increment(story.diggs, config.positions.factor(slot + 1),
                                           r, x, dt);
        story.diggs = std::max(kMinDiggs, story.diggs + dn);
        step_total += dn;
    }
    state.stories = std::move(page);
    state.total += step_total;
    if (config.record_per_step_totals)
        state.per_step_totals.push_back(step_total);

    state.now += dt;

    // arrivals: each new story enters, then the lowest-index story drops
    const double lambda = std::isinf(config.arrival_interval_minutes)
                              ? 0.0
                              : dt / config.arrival_interval_minutes;
    const std::uint64_t arrivals = state.rng.poisson(lambda);
    for (std::uint64_t k = 0; k < arrivals; ++k) {
        state.stories.push_back({state.next_id++, 1.0, state.now});
        ++state.stories_created;
        const std::uint64_t drop =
            evict_lowest(state.stories, config.strategy, config.decay, state.now);
        for (auto it = state.stories.begin(); it != state.stories.end(); ++it) {
            if (it->id == drop) {
                state.stories.erase(it);
                break;
            }
        }
    }
}

/// Run the full horizon and summarize.
inline RunSummary run(const SimConfig& config) {
    SimState state = init(config);
    for (std::uint64_t i = 0; i < config.steps; ++i)
        step(state, config);
    RunSummary summary;
    summary.total_diggs = state.total;
    summary.stories_created = state.stories_created;
    summary.final_page = rank(state.stories, config.strategy, config.decay, state.now);
    if (config.record_per_step_totals)
        summary.per_step_totals = std::move(state.per_step_totals);
    return summary;
}

struct SweepRow {
    double beta;
    IndexStrategy strategy;
    std::uint64_t seed;  // the derived per-run seed
    double total_diggs;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t beta_idx,
                                 std::uint64_t strategy_idx, std::uint64_t seed_idx) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ beta_idx);
    h = splitmix64(h ^ strategy_idx);
    return splitmix64(h ^ seed_idx);
}

}  // namespace detail

/// One run per (beta, strategy, seed-index) triple. Per-run seeds are
/// derived from the base config's seed and the grid coordinates, so the
/// table is independent of execution order.
inline std::vector<SweepRow> sweep(const SimConfig& base,
                                   const std::vector<double>& beta_values,
                                   const std::vector<IndexStrategy>& strategies,
                                   std::size_t num_seeds) {
    if (beta_values.empty() || strategies.empty() || num_seeds == 0)
        throw std::invalid_argument("sweep: empty grid");
    std::vector<SimConfig> configs;
    std::vector<SweepRow> rows;
    for (std::size_t bi = 0; bi < beta_values.size(); ++bi) {
        for (std::size_t si = 0; si < strategies.size(); ++si) {
            for (std::size_t ki = 0; ki < num_seeds; ++ki) {
                SimConfig config = base;
                config.decay = DecayLaw(base.decay.alpha, beta_values[bi]);
                config.strategy = strategies[si];
                config.seed = detail::derive_seed(base.seed, bi, si, ki);
                configs.push_back(config);
                rows.push_back({beta_values[bi], strategies[si], config.seed, 0.0});
            }
        }
    }
    // each run owns its own generator, so cells can execute concurrently
    // and the table order stays fixed by grid index
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              configs.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < configs.size(); i += workers)
                rows[i].total_diggs = run(configs[i]).total_diggs;
        });
    }
    for (auto& t : pool)
        t.join();
    return rows;
}

/// Relative performance o2 / (o1 + o2) in [0, 1].
inline double relative_performance(double total_o1, double total_o2) {
    if (total_o1 < 0.0 || total_o2 < 0.0)
        throw std::invalid_argument("relative_performance: totals must be >= 0");
    if (total_o1 == 0.0 && total_o2 == 0.0)
        throw std::invalid_argument("relative_performance: both totals are zero");
    return total_o2 / (total_o1 + total_o2);
}

}  // namespace attention
