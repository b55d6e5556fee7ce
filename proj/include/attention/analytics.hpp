#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "attention/model.hpp"

namespace attention {

/// Parameters of the critical equation: mean position factor, page size,
/// arrival spacing and horizon. One page cycle is m*s minutes.
struct CriticalParams {
    double abar = 0.08;
    std::size_t slots = 15;
    double arrival_interval = 20.0;  // s, minutes
    double horizon = 50000.0;        // T, minutes

    double page_cycle() const { return static_cast<double>(slots) * arrival_interval; }

    void validate() const {
        if (!(abar > 0.0))
            throw std::invalid_argument("CriticalParams: abar must be positive");
        if (slots < 1)
            throw std::invalid_argument("CriticalParams: slots must be >= 1");
        if (!(arrival_interval > 0.0))
            throw std::invalid_argument("CriticalParams: arrival interval must be positive");
        if (!(horizon > page_cycle()))
            throw std::invalid_argument("CriticalParams: horizon must exceed one page cycle");
    }
};

enum class Region { NoveltyFirst, PopularityFirst, Critical };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::NoveltyFirst: return "novelty-first";
        case Region::PopularityFirst: return "popularity-first";
        case Region::Critical: return "critical";
    }
    return "?";
}

struct PhasePoint {
    double alpha;
    double beta;
    double residual;
    Region region;
};

// |residual| below this labels a cell "critical" in phase-diagram output.
inline constexpr double kCriticalLabelTolerance = 1e-3;

/// Upper incomplete Gamma function Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt.
/// Series expansion below x = a+1, Lentz continued fraction above.
inline double upper_incomplete_gamma(double a, double x) {
    if (!(a > 0.0))
        throw std::invalid_argument("upper_incomplete_gamma: a must be positive");
    if (x < 0.0)
        throw std::invalid_argument("upper_incomplete_gamma: x must be >= 0");
    if (x == 0.0)
        return std::tgamma(a);

    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr int max_iter = 10000;

    if (x < a + 1.0) {
        // lower series: gamma(a,x) = x^a e^-x sum x^n / (a (a+1) ... (a+n))
        double ap = a;
        double term = 1.0 / a;
        double sum = term;
        for (int n = 0; n < max_iter; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * eps)
                break;
        }
        const double lower = sum * std::exp(-x + a * std::log(x));
        return std::tgamma(a) - lower;
    }

    // continued fraction for Gamma(a,x) (modified Lentz)
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps)
            break;
    }
    return std::exp(-x + a * std::log(x)) * h;
}

/// Novelty tail integral int_t0^inf e^(-alpha t^beta) dt
/// = alpha^(-1/beta) / beta * Gamma(1/beta, alpha t0^beta).
inline double tail_integral(const DecayLaw& decay, double t0) {
    if (decay.alpha == 0.0)
        throw std::domain_error("tail_integral: divergent for alpha = 0");
    if (t0 < 0.0)
        throw std::invalid_argument("tail_integral: t0 must be >= 0");
    const double inv_beta = 1.0 / decay.beta;
    const double x = t0 == 0.0 ? 0.0 : decay.alpha * std::pow(t0, decay.beta);
    return std::pow(decay.alpha, -inv_beta) * inv_beta * upper_incomplete_gamma(inv_beta, x);
}

/// E log N_inf under popularity ordering: abar * int_0^inf r_t dt.
inline double expected_log_diggs_popularity(const CriticalParams& params,
                                            const DecayLaw& decay) {
    return params.abar * tail_integral(decay, 0.0);
}

/// Per-story log-performance under novelty ordering:
/// abar * int_0^{ms} r_t dt + ln(T / (ms)).
inline double expected_log_diggs_novelty(const CriticalParams& params,
                                         const DecayLaw& decay) {
    const double ms = params.page_cycle();
    if (!(params.horizon >= ms))
        throw std::invalid_argument("expected_log_diggs_novelty: horizon below one page cycle");
    return params.abar * (tail_integral(decay, 0.0) - tail_integral(decay, ms)) +
           std::log(params.horizon / ms);
}

/// Novelty left after one page cycle minus log-time remaining:
/// abar * int_{ms}^inf r_t dt - ln(T / (ms)).
/// Positive: popularity-first. Negative: novelty-first.
inline double critical_residual(double alpha, double beta, const CriticalParams& params) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("critical_residual: alpha must be positive");
    params.validate();
    const double ms = params.page_cycle();
    return params.abar * tail_integral(DecayLaw(alpha, beta), ms) -
           std::log(params.horizon / ms);
}

/// Solve critical_residual(alpha, beta) = 0 for beta by bisection.
/// The bracket must straddle a sign change.
inline double critical_beta(double alpha, const CriticalParams& params,
                            std::pair<double, double> bracket) {
    const auto [lo0, hi0] = bracket;
    double lo = lo0, hi = hi0;
    double f_lo = critical_residual(alpha, lo, params);
    double f_hi = critical_residual(alpha, hi, params);
    if (f_lo == 0.0)
        return lo;
    if (f_hi == 0.0)
        return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw std::runtime_error(
            "critical_beta: no sign change in bracket (residuals " + std::to_string(f_lo) +
            ", " + std::to_string(f_hi) + ")");
    // stop once the bracket is below 1e-6 and the midpoint residual is
    // negligible against the log horizon term
    const double residual_tol =
        1e-6 * std::fabs(std::log(params.horizon / params.page_cycle()));
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f_mid = critical_residual(alpha, mid, params);
        if (f_mid == 0.0 || (hi - lo <= 1e-6 && std::fabs(f_mid) < residual_tol))
            return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
    }
    return mid;
}

struct CriticalCurvePoint {
    double alpha;
    std::optional<double> beta_critical;  // absent when no root in the bracket
};

struct PhaseDiagram {
    std::vector<CriticalCurvePoint> curve;
    std::vector<PhasePoint> points;
};

inline Region classify_residual(double residual) {
    if (std::fabs(residual) < kCriticalLabelTolerance)
        return Region::Critical;
    return residual > 0.0 ? Region::PopularityFirst : Region::NoveltyFirst;
}

/// For each alpha, attempt the critical beta and classify the sample
/// (alpha, beta) cells. Per-alpha root failures become absent curve
/// entries, not errors.
inline PhaseDiagram phase_diagram(const std::vector<double>& alpha_grid,
                                  const CriticalParams& params,
                                  const std::vector<double>& beta_grid = {
                                      0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    if (alpha_grid.empty())
        throw std::invalid_argument("phase_diagram: empty alpha grid");
    params.validate();
    PhaseDiagram out;
    out.curve.reserve(alpha_grid.size());
    for (double alpha : alpha_grid) {
        CriticalCurvePoint point{alpha, std::nullopt};
        try {
            point.beta_critical = critical_beta(alpha, params, {1e-3, 1.0});
        } catch (const std::runtime_error&) {
        }
        out.curve.push_back(point);
        for (double beta : beta_grid) {
            const double residual = critical_residual(alpha, beta, params);
            out.points.push_back({alpha, beta, residual, classify_residual(residual)});
        }
    }
    return out;
}

}  // namespace attention
