#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "attention/analytics.hpp"
#include "oracles.hpp"

using namespace attention;
using Catch::Approx;

namespace {
const CriticalParams kDiggParams{0.08, 15, 20.0, 50000.0};
}

TEST_CASE("incomplete gamma closed-form checks") {
    CHECK(upper_incomplete_gamma(1.0, 2.0) == Approx(std::exp(-2.0)).margin(1e-12));
    CHECK(upper_incomplete_gamma(3.0, 0.0) == Approx(2.0).margin(1e-12));
    CHECK(upper_incomplete_gamma(2.5, 0.0) ==
          Approx(1.5 * 0.5 * std::sqrt(std::numbers::pi)).margin(1e-10));
    CHECK_THROWS_AS(upper_incomplete_gamma(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(upper_incomplete_gamma(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("incomplete gamma matches quadrature") {
    CHECK(upper_incomplete_gamma(2.5, 3.917) ==
          Approx(oracles::upper_incomplete_gamma_quadrature(2.5, 3.917)).epsilon(1e-9));
    for (double a : {0.5, 1.7, 4.0, 9.0})
        for (double x : {0.3, 2.0, 11.0, 40.0})
            CHECK(upper_incomplete_gamma(a, x) ==
                  Approx(oracles::upper_incomplete_gamma_quadrature(a, x))
                      .epsilon(1e-8)
                      .margin(1e-12));
}

TEST_CASE("gamma recurrence holds over the stated box") {
    for (double a = 0.25; a <= 5.0; a += 0.25) {
        for (double x = 0.0; x <= 20.0; x += 1.25) {
            const double lhs = upper_incomplete_gamma(a + 1.0, x);
            const double rhs = a * upper_incomplete_gamma(a, x) +
                               (x == 0.0 ? 0.0 : std::pow(x, a) * std::exp(-x));
            CHECK(lhs == Approx(rhs).margin(1e-8));
        }
    }
}

TEST_CASE("tail integral closed forms") {
    // beta = 1: pure exponential tail e^(-alpha t0) / alpha
    CHECK(tail_integral(DecayLaw(0.4, 1.0), 0.0) == Approx(2.5).epsilon(1e-12));
    CHECK(tail_integral(DecayLaw(0.4, 1.0), 10.0) ==
          Approx(std::exp(-4.0) / 0.4).epsilon(1e-10));
    CHECK_THROWS_AS(tail_integral(DecayLaw(0.0, 0.5), 0.0), std::domain_error);
    CHECK_THROWS_AS(tail_integral(DecayLaw(0.4, 0.4), -1.0), std::invalid_argument);
}

TEST_CASE("tail integral agrees with quadrature and decreases in t0") {
    for (double alpha : {0.1, 0.4, 1.0}) {
        for (double beta : {0.3, 0.5, 1.0}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double t0 : {0.0, 100.0, 300.0, 1000.0}) {
                const double got = tail_integral(DecayLaw(alpha, beta), t0);
                CHECK(got == Approx(oracles::tail_integral_quadrature(alpha, beta, t0))
                                 .epsilon(1e-6)
                                 .margin(1e-290));  // both may underflow
                CHECK(got < prev);
                CHECK(got >= 0.0);
                if (got == 0.0)  // e^(-alpha t0^beta) below double range
                    CHECK(alpha * std::pow(t0, beta) > 700.0);
                prev = got;
            }
        }
    }
}

TEST_CASE("expected log diggs under popularity ordering") {
    const DecayLaw digg(0.4, 0.4);
    CHECK(expected_log_diggs_popularity(kDiggParams, digg) ==
          Approx(0.08 * tail_integral(digg, 0.0)).epsilon(1e-12));
    CHECK(expected_log_diggs_popularity(kDiggParams, DecayLaw(0.4, 1.0)) ==
          Approx(0.08 * 2.5).epsilon(1e-12));
    CriticalParams zero = kDiggParams;
    zero.abar = 1e-300;  // abar -> 0 limit
    CHECK(expected_log_diggs_popularity(zero, digg) == Approx(0.0).margin(1e-12));
}

TEST_CASE("expected log diggs under novelty ordering") {
    const DecayLaw digg(0.4, 0.4);
    const double v = expected_log_diggs_novelty(kDiggParams, digg);
    CHECK(v > 0.0);
    const double truncated =
        0.08 * (oracles::tail_integral_quadrature(0.4, 0.4, 0.0) -
                oracles::tail_integral_quadrature(0.4, 0.4, 300.0)) +
        std::log(50000.0 / 300.0);
    CHECK(v == Approx(truncated).epsilon(1e-6));

    // T = ms: the log term vanishes
    CriticalParams tight = kDiggParams;
    tight.horizon = tight.page_cycle();
    CHECK(expected_log_diggs_novelty(tight, digg) ==
          Approx(0.08 * (tail_integral(digg, 0.0) - tail_integral(digg, 300.0)))
              .epsilon(1e-10));

    CriticalParams tiny = kDiggParams;
    tiny.abar = 1e-300;
    CHECK(expected_log_diggs_novelty(tiny, digg) ==
          Approx(std::log(50000.0 / 300.0)).margin(1e-10));
}

TEST_CASE("critical residual signs") {
    // the digg point sits in the novelty-first region
    CHECK(critical_residual(0.4, 0.4, kDiggParams) < 0.0);
    // huge alpha at beta = 1: no novelty left, residual -> -ln(T/ms)
    CHECK(critical_residual(50.0, 1.0, kDiggParams) ==
          Approx(-std::log(50000.0 / 300.0)).margin(1e-6));
    CHECK_THROWS_AS(critical_residual(0.0, 0.4, kDiggParams), std::invalid_argument);
}

TEST_CASE("critical residual decreases in beta and in horizon") {
    double prev = std::numeric_limits<double>::infinity();
    for (double beta = 0.15; beta <= 1.0; beta += 0.05) {
        const double r = critical_residual(0.4, beta, kDiggParams);
        // past beta ~ 0.7 the novelty term is below double resolution of
        // the log term, so adjacent residuals can tie exactly
        if (beta <= 0.65)
            CHECK(r < prev);
        else
            CHECK(r <= prev);
        prev = r;
    }
    CriticalParams longer = kDiggParams;
    longer.horizon = 100000.0;
    CHECK(critical_residual(0.4, 0.4, longer) < critical_residual(0.4, 0.4, kDiggParams));
}

TEST_CASE("critical beta root find") {
    const double beta_star = critical_beta(0.4, kDiggParams, {0.1, 1.0});
    CHECK(beta_star > 0.1);
    CHECK(beta_star < 0.4);
    CHECK(std::fabs(critical_residual(0.4, beta_star, kDiggParams)) <
          1e-6 * std::log(50000.0 / 300.0));

    // the critical curve slopes down in alpha
    double prev = 1.0;
    for (double alpha : {0.2, 0.4, 0.6, 0.8}) {
        const double b = critical_beta(alpha, kDiggParams, {0.01, 1.0});
        CHECK(b < prev);
        prev = b;
    }

    // bracket entirely on the novelty-first side
    CHECK_THROWS_WITH(critical_beta(0.4, kDiggParams, {0.6, 1.0}),
                      Catch::Matchers::ContainsSubstring("no sign change"));
}

TEST_CASE("phase diagram classification and self-consistency") {
    std::vector<double> alphas;
    for (double a = 0.1; a <= 1.0 + 1e-9; a += 0.05)
        alphas.push_back(a);
    const auto diagram = phase_diagram(alphas, kDiggParams);
    REQUIRE(diagram.curve.size() == alphas.size());
    const double tol = 1e-6 * std::log(50000.0 / 300.0);
    for (const auto& p : diagram.curve) {
        if (p.beta_critical)
            CHECK(std::fabs(critical_residual(p.alpha, *p.beta_critical, kDiggParams)) < tol);
    }
    for (const auto& p : diagram.points) {
        switch (p.region) {
            case Region::PopularityFirst: CHECK(p.residual >= kCriticalLabelTolerance); break;
            case Region::NoveltyFirst: CHECK(p.residual <= -kCriticalLabelTolerance); break;
            case Region::Critical: CHECK(std::fabs(p.residual) < kCriticalLabelTolerance); break;
        }
    }
    // far above the curve: novelty-first; far below: popularity-first
    CHECK(classify_residual(critical_residual(0.4, 0.9, kDiggParams)) ==
          Region::NoveltyFirst);
    CHECK(classify_residual(critical_residual(0.4, 0.15, kDiggParams)) ==
          Region::PopularityFirst);
    CHECK_THROWS_AS(phase_diagram({}, kDiggParams), std::invalid_argument);
}

TEST_CASE("critical params validation") {
    CriticalParams bad = kDiggParams;
    bad.abar = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = kDiggParams;
    bad.horizon = 200.0;  // below one page cycle
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
