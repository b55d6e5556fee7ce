#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "attention/simulator.hpp"

using namespace attention;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SimConfig single_slot_config() {
    SimConfig config;
    config.slots = 1;
    config.positions = PositionProfile::uniform(1, 0.1);
    config.arrival_interval_minutes = kInf;
    config.noise = NoiseLaw(0.0);
    config.decay = DecayLaw(0.0, 0.5);
    config.strategy = IndexStrategy::popularity();
    return config;
}

}  // namespace

TEST_CASE("init seeds m stories at (1, 0)") {
    SimConfig config;
    const auto state = init(config);
    REQUIRE(state.stories.size() == 15);
    for (std::size_t i = 0; i < 15; ++i) {
        CHECK(state.stories[i].id == i + 1);
        CHECK(state.stories[i].diggs == 1.0);
        CHECK(state.stories[i].birth_time == 0.0);
    }
    CHECK(state.total == 0.0);

    const auto one = init(single_slot_config());
    CHECK(one.stories.size() == 1);
}

TEST_CASE("config validation") {
    SimConfig config;
    config.slots = 10;  // mismatched with the 15-slot default profile
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.slots = 15;
    config.step_minutes = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("deterministic two-step trace without noise or decay") {
    const SimConfig config = single_slot_config();
    auto state = init(config);
    step(state, config);
    CHECK(state.stories[0].diggs == Approx(1.5).epsilon(1e-12));
    CHECK(state.total == Approx(0.5).epsilon(1e-12));
    step(state, config);
    CHECK(state.stories[0].diggs == Approx(2.25).epsilon(1e-12));
    CHECK(state.total == Approx(1.25).epsilon(1e-12));
}

TEST_CASE("disabled arrivals keep the story pool fixed") {
    SimConfig config;
    config.arrival_interval_minutes = kInf;
    config.seed = 3;
    auto state = init(config);
    for (int i = 0; i < 50; ++i)
        step(state, config);
    REQUIRE(state.stories.size() == 15);
    for (const auto& story : state.stories)
        CHECK(story.id <= 15);
}

TEST_CASE("equal seeds give identical states and summaries") {
    SimConfig config;
    config.seed = 99;
    config.steps = 200;
    auto a = init(config);
    auto b = init(config);
    for (int i = 0; i < 30; ++i) {
        step(a, config);
        step(b, config);
    }
    REQUIRE(a.stories.size() == b.stories.size());
    for (std::size_t i = 0; i < a.stories.size(); ++i) {
        CHECK(a.stories[i].id == b.stories[i].id);
        CHECK(a.stories[i].diggs == b.stories[i].diggs);
    }
    const auto ra = run(config);
    const auto rb = run(config);
    CHECK(ra.total_diggs == rb.total_diggs);
    CHECK(ra.stories_created == rb.stories_created);
}

TEST_CASE("pool size is exactly m after every step") {
    SimConfig config;
    config.arrival_interval_minutes = 1.0;  // several arrivals per step
    config.seed = 5;
    auto state = init(config);
    for (int i = 0; i < 200; ++i) {
        step(state, config);
        REQUIRE(state.stories.size() == 15);
    }
    CHECK(state.stories_created > 15);
}

TEST_CASE("total is nondecreasing without noise") {
    SimConfig config;
    config.noise = NoiseLaw(0.0);
    config.seed = 6;
    auto state = init(config);
    double prev = 0.0;
    for (int i = 0; i < 100; ++i) {
        step(state, config);
        CHECK(state.total >= prev);
        prev = state.total;
    }
}

TEST_CASE("noise-free single-slot log total matches the exact product") {
    SimConfig config = single_slot_config();
    config.decay = DecayLaw(0.4, 0.4);
    const int steps = 200;
    auto state = init(config);
    double expected_log = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * config.step_minutes;
        expected_log += std::log(1.0 + config.step_minutes * 0.1 * novelty(config.decay, t));
        step(state, config);
    }
    CHECK(std::log(state.stories[0].diggs) == Approx(expected_log).epsilon(1e-9));
}

TEST_CASE("under popularity with no decay the founders are never evicted") {
    SimConfig config;
    config.decay = DecayLaw(0.0, 0.5);
    config.noise = NoiseLaw(0.0);
    config.strategy = IndexStrategy::popularity();
    config.seed = 8;
    auto state = init(config);
    for (int i = 0; i < 200; ++i)
        step(state, config);
    for (const auto& story : state.stories)
        CHECK(story.id <= 15);
    CHECK(state.stories_created > 15);  // arrivals happened and were dropped
}

TEST_CASE("zero steps means zero total") {
    SimConfig config;
    config.steps = 0;
    const auto summary = run(config);
    CHECK(summary.total_diggs == 0.0);
    CHECK(summary.stories_created == 15);
}

TEST_CASE("per-step totals sum to the run total") {
    SimConfig config;
    config.steps = 100;
    config.seed = 21;
    config.record_per_step_totals = true;
    const auto summary = run(config);
    REQUIRE(summary.per_step_totals.has_value());
    REQUIRE(summary.per_step_totals->size() == 100);
    double sum = 0.0;
    for (double v : *summary.per_step_totals)
        sum += v;
    CHECK(sum == Approx(summary.total_diggs).epsilon(1e-9));
}

TEST_CASE("single-cell sweep reduces to run") {
    SimConfig base;
    base.steps = 300;
    base.seed = 17;
    const auto rows = sweep(base, {0.4}, {IndexStrategy::novelty()}, 1);
    REQUIRE(rows.size() == 1);
    SimConfig config = base;
    config.seed = rows[0].seed;
    CHECK(rows[0].total_diggs == run(config).total_diggs);
    CHECK(rows[0].beta == 0.4);
}

TEST_CASE("sweep table shape and determinism") {
    SimConfig base;
    base.steps = 50;
    base.seed = 30;
    const std::vector<double> betas = {0.3, 0.4};
    const std::vector<IndexStrategy> strategies = {IndexStrategy::novelty(),
                                                   IndexStrategy::popularity()};
    const auto rows = sweep(base, betas, strategies, 3);
    REQUIRE(rows.size() == 12);
    // row order: beta-major, then strategy, then seed index
    CHECK(rows[0].beta == 0.3);
    CHECK(rows[11].beta == 0.4);
    CHECK(rows[0].strategy.kind == StrategyKind::Novelty);
    CHECK(rows[3].strategy.kind == StrategyKind::Popularity);
    const auto again = sweep(base, betas, strategies, 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].seed == again[i].seed);
        CHECK(rows[i].total_diggs == again[i].total_diggs);
    }
    CHECK_THROWS_AS(sweep(base, {}, strategies, 3), std::invalid_argument);
}

TEST_CASE("relative performance") {
    CHECK(relative_performance(100.0, 100.0) == Approx(0.5));
    CHECK(relative_performance(514314.8, 354.6) == Approx(0.000689).margin(2e-6));
    CHECK(relative_performance(0.0, 10.0) == 1.0);
    CHECK_THROWS_AS(relative_performance(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(relative_performance(-1.0, 1.0), std::invalid_argument);
}
