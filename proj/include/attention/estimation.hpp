#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "attention/model.hpp"

namespace attention {

/// One observed log growth rate for a (slot, lifetime) pair.
struct SamplePoint {
    int position;      // slot index, 1-based
    double lifetime;   // minutes
    double rate;       // log growth per minute
};

struct FitResult {
    std::map<int, double> position_factors;  // slot -> a_hat
    double alpha = 0.0;
    double beta = 0.0;
    double rss = 0.0;
    // false when fitted alpha ~ 0: with no decay, beta has no effect
    bool beta_identifiable = true;
};

/// Parse sample rows. Expected header:
/// story_id,position,lifetime_minutes,diggs_before,diggs_after,interval_minutes
/// The rate is computed per row from the before/after digg counts.
inline std::vector<SamplePoint> load_samples(std::istream& in) {
    static const std::string expected_header =
        "story_id,position,lifetime_minutes,diggs_before,diggs_after,interval_minutes";
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("samples: empty input, expected header '" +
                                 expected_header + "'");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != expected_header)
        throw std::runtime_error("samples: malformed header, expected '" +
                                 expected_header + "'");
    std::vector<SamplePoint> samples;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (fields.size() != 6)
            throw std::runtime_error("samples: row " + std::to_string(row) +
                                     " has " + std::to_string(fields.size()) +
                                     " fields, expected 6");
        int position = 0;
        double lifetime = 0.0, before = 0.0, after = 0.0, interval = 0.0;
        try {
            position = std::stoi(fields[1]);
            lifetime = std::stod(fields[2]);
            before = std::stod(fields[3]);
            after = std::stod(fields[4]);
            interval = std::stod(fields[5]);
        } catch (const std::exception&) {
            throw std::runtime_error("samples: nonnumeric field in row " +
                                     std::to_string(row));
        }
        if (position < 1 || lifetime < 0.0)
            throw std::runtime_error("samples: bad position or lifetime in row " +
                                     std::to_string(row));
        if (!(before > 0.0) || !(after > 0.0))
            throw std::runtime_error("samples: nonpositive digg count in row " +
                                     std::to_string(row));
        if (!(interval > 0.0))
            throw std::runtime_error("samples: nonpositive interval in row " +
                                     std::to_string(row));
        samples.push_back({position, lifetime, log_growth_rate(before, after, interval)});
    }
    return samples;
}

/// Closed-form least-squares position factor for one slot:
/// a_hat = sum_j s_j r_j / sum_j r_j^2, minimizing sum_j (s_j - a_hat r_j)^2.
inline double fit_position_factor(const std::vector<SamplePoint>& samples,
                                  const DecayLaw& decay) {
    if (samples.empty())
        throw std::invalid_argument("fit_position_factor: no samples");
    double num = 0.0, den = 0.0;
    for (const auto& s : samples) {
        const double r = novelty(decay, s.lifetime);
        num += s.rate * r;
        den += r * r;
    }
    if (den == 0.0)
        throw std::invalid_argument("fit_position_factor: all-zero regressor");
    return num / den;
}

namespace detail {

inline double fit_rss(const std::map<int, std::vector<SamplePoint>>& by_slot,
                      const DecayLaw& decay) {
    double rss = 0.0;
    for (const auto& [slot, samples] : by_slot) {
        const double a_hat = fit_position_factor(samples, decay);
        for (const auto& s : samples) {
            const double resid = s.rate - a_hat * novelty(decay, s.lifetime);
            rss += resid * resid;
        }
    }
    return rss;
}

}  // namespace detail

/// Joint fit of (alpha, beta) plus per-slot factors: grid search over the
/// boxes, then coordinate-descent refinement around the best grid point
/// until the RSS improvement drops below 1e-9.
inline FitResult fit_decay(const std::vector<SamplePoint>& samples,
                           std::pair<double, double> alpha_box = {0.05, 1.0},
                           std::pair<double, double> beta_box = {0.1, 1.0},
                           std::size_t grid_points = 41) {
    if (samples.empty())
        throw std::invalid_argument("fit_decay: no samples");
    if (!(alpha_box.first <= alpha_box.second) || !(beta_box.first <= beta_box.second))
        throw std::invalid_argument("fit_decay: empty search box");
    if (alpha_box.first < 0.0 || !(beta_box.first > 0.0) || !(beta_box.second <= 1.0))
        throw std::invalid_argument("fit_decay: box outside alpha >= 0, beta in (0, 1]");
    if (grid_points < 2)
        throw std::invalid_argument("fit_decay: need at least a 2x2 grid");

    std::map<int, std::vector<SamplePoint>> by_slot;
    double min_lifetime = samples.front().lifetime;
    double max_lifetime = samples.front().lifetime;
    for (const auto& s : samples) {
        by_slot[s.position].push_back(s);
        min_lifetime = std::min(min_lifetime, s.lifetime);
        max_lifetime = std::max(max_lifetime, s.lifetime);
    }
    if (min_lifetime == max_lifetime)
        throw std::invalid_argument("fit_decay: need samples at >= 2 distinct lifetimes");

    const double da = (alpha_box.second - alpha_box.first) /
                      static_cast<double>(grid_points - 1);
    const double db = (beta_box.second - beta_box.first) /
                      static_cast<double>(grid_points - 1);

    // grid stage; ties go to the lexicographically smallest (alpha, beta)
    double best_alpha = alpha_box.first, best_beta = beta_box.first;
    double best_rss = detail::fit_rss(by_slot, DecayLaw(best_alpha, best_beta));
    for (std::size_t ia = 0; ia < grid_points; ++ia) {
        const double alpha = alpha_box.first + da * static_cast<double>(ia);
        for (std::size_t ib = 0; ib < grid_points; ++ib) {
            const double beta = beta_box.first + db * static_cast<double>(ib);
            const double rss = detail::fit_rss(by_slot, DecayLaw(alpha, beta));
            if (rss < best_rss) {
                best_rss = rss;
                best_alpha = alpha;
                best_beta = beta;
            }
        }
    }

    // simplex refinement around the best cell (Nelder-Mead with box
    // clamping); plain per-coordinate descent stalls in the correlated
    // (alpha, beta) valley, the simplex tracks its curvature
    auto clamped_eval = [&](double a, double b) {
        a = std::clamp(a, alpha_box.first, alpha_box.second);
        b = std::clamp(b, beta_box.first, beta_box.second);
        return detail::fit_rss(by_slot, DecayLaw(a, b));
    };
    struct Vertex {
        double a, b, f;
    };
    auto make_vertex = [&](double a, double b) {
        return Vertex{std::clamp(a, alpha_box.first, alpha_box.second),
                      std::clamp(b, beta_box.first, beta_box.second), 0.0};
    };
    std::array<Vertex, 3> simplex = {
        make_vertex(best_alpha, best_beta),
        make_vertex(best_alpha + (best_alpha + da <= alpha_box.second ? da : -da),
                    best_beta),
        make_vertex(best_alpha,
                    best_beta + (best_beta + db <= beta_box.second ? db : -db))};
    for (auto& v : simplex)
        v.f = clamped_eval(v.a, v.b);
    auto by_value = [](const Vertex& x, const Vertex& y) { return x.f < y.f; };
    std::sort(simplex.begin(), simplex.end(), by_value);
    int stalled = 0;
    for (int iter = 0; iter < 2000 && stalled < 25; ++iter) {
        const double f_before = simplex[0].f;
        const double ca = 0.5 * (simplex[0].a + simplex[1].a);
        const double cb = 0.5 * (simplex[0].b + simplex[1].b);
        Vertex& worst = simplex[2];
        const double ra = ca + (ca - worst.a), rb = cb + (cb - worst.b);
        const double fr = clamped_eval(ra, rb);
        if (fr < simplex[0].f) {
            const double ea = ca + 2.0 * (ca - worst.a), eb = cb + 2.0 * (cb - worst.b);
            const double fe = clamped_eval(ea, eb);
            worst = fe < fr ? make_vertex(ea, eb) : make_vertex(ra, rb);
            worst.f = std::min(fe, fr);
        } else if (fr < simplex[1].f) {
            worst = make_vertex(ra, rb);
            worst.f = fr;
        } else {
            const double base_a = fr < worst.f ? ra : worst.a;
            const double base_b = fr < worst.f ? rb : worst.b;
            const double base_f = std::min(fr, worst.f);
            const double sa = ca + 0.5 * (base_a - ca), sb = cb + 0.5 * (base_b - cb);
            const double fs = clamped_eval(sa, sb);
            if (fs < base_f) {
                worst = make_vertex(sa, sb);
                worst.f = fs;
            } else {
                // shrink toward the best vertex
                for (int i = 1; i < 3; ++i) {
                    simplex[i] = make_vertex(
                        simplex[0].a + 0.5 * (simplex[i].a - simplex[0].a),
                        simplex[0].b + 0.5 * (simplex[i].b - simplex[0].b));
                    simplex[i].f = clamped_eval(simplex[i].a, simplex[i].b);
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_value);
        stalled = f_before - simplex[0].f < 1e-9 * std::max(1.0, simplex[0].f)
                      ? stalled + 1
                      : 0;
    }
    if (simplex[0].f < best_rss) {
        best_rss = simplex[0].f;
        best_alpha = simplex[0].a;
        best_beta = simplex[0].b;
    }

    FitResult result;
    result.alpha = best_alpha;
    result.beta = best_beta;
    result.rss = best_rss;
    result.beta_identifiable = best_alpha > 1e-6;
    const DecayLaw best_decay(best_alpha, best_beta);
    for (const auto& [slot, slot_samples] : by_slot)
        result.position_factors[slot] = fit_position_factor(slot_samples, best_decay);
    return result;
}

/// Pointwise fitted growth curve (t, a_hat * r_t) for plot emission.
inline std::vector<std::pair<double, double>> expected_growth_curve(
    double a_hat, const DecayLaw& decay, const std::vector<double>& t_grid) {
    if (!(a_hat > 0.0))
        throw std::invalid_argument("expected_growth_curve: a_hat must be positive");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(t_grid.size());
    for (double t : t_grid)
        curve.emplace_back(t, a_hat * novelty(decay, t));
    return curve;
}

}  // namespace attention
