#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "attention/analytics.hpp"
#include "attention/estimation.hpp"
#include "attention/simulator.hpp"

namespace attention {

/// Shortest representation that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// -- run / sweep ------------------------------------------------------------

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "beta,strategy,seed,total_diggs\n";
    for (const auto& row : rows)
        out << format_double(row.beta) << ',' << row.strategy.name() << ','
            << row.seed << ',' << format_double(row.total_diggs) << '\n';
}

inline nlohmann::json sweep_to_json(const std::vector<SweepRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows)
        arr.push_back({{"beta", row.beta},
                       {"strategy", row.strategy.name()},
                       {"seed", row.seed},
                       {"total_diggs", row.total_diggs}});
    return arr;
}

inline void write_run_csv(std::ostream& out, const SimConfig& config,
                          const RunSummary& summary) {
    out << "beta,strategy,seed,total_diggs\n";
    out << format_double(config.decay.beta) << ',' << config.strategy.name() << ','
        << config.seed << ',' << format_double(summary.total_diggs) << '\n';
}

inline nlohmann::json run_to_json(const SimConfig& config, const RunSummary& summary) {
    nlohmann::json page = nlohmann::json::array();
    for (const auto& story : summary.final_page)
        page.push_back({{"id", story.id},
                        {"diggs", story.diggs},
                        {"birth_time", story.birth_time}});
    nlohmann::json j = {{"beta", config.decay.beta},
                        {"strategy", config.strategy.name()},
                        {"seed", config.seed},
                        {"total_diggs", summary.total_diggs},
                        {"stories_created", summary.stories_created},
                        {"final_page", page}};
    if (summary.per_step_totals)
        j["per_step_totals"] = *summary.per_step_totals;
    return j;
}

// -- phase diagram ----------------------------------------------------------

inline void write_phase_curve_csv(std::ostream& out, const PhaseDiagram& diagram) {
    out << "alpha,beta_critical\n";
    for (const auto& p : diagram.curve) {
        out << format_double(p.alpha) << ',';
        if (p.beta_critical)
            out << format_double(*p.beta_critical);
        out << '\n';
    }
}

inline void write_phase_points_csv(std::ostream& out, const PhaseDiagram& diagram) {
    out << "# residual > 0: popularity-first; residual < 0: novelty-first\n";
    out << "alpha,beta,residual,region\n";
    for (const auto& p : diagram.points)
        out << format_double(p.alpha) << ',' << format_double(p.beta) << ','
            << format_double(p.residual) << ',' << region_name(p.region) << '\n';
}

inline nlohmann::json phase_to_json(const PhaseDiagram& diagram) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& p : diagram.curve) {
        nlohmann::json entry = {{"alpha", p.alpha}};
        entry["beta_critical"] =
            p.beta_critical ? nlohmann::json(*p.beta_critical) : nlohmann::json(nullptr);
        curve.push_back(entry);
    }
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : diagram.points)
        points.push_back({{"alpha", p.alpha},
                          {"beta", p.beta},
                          {"residual", p.residual},
                          {"region", region_name(p.region)}});
    return {{"residual_sign", "positive is popularity-first, negative is novelty-first"},
            {"critical_curve", curve},
            {"points", points}};
}

// -- fits -------------------------------------------------------------------

inline nlohmann::json fit_to_json(const FitResult& fit) {
    nlohmann::json factors = nlohmann::json::object();
    for (const auto& [slot, a_hat] : fit.position_factors)
        factors[std::to_string(slot)] = a_hat;
    return {{"alpha", fit.alpha},
            {"beta", fit.beta},
            {"position_factors", factors},
            {"rss", fit.rss},
            {"beta_identifiable", fit.beta_identifiable}};
}

}  // namespace attention
