// Command-line front end: simulate / sweep / phase / fit.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attention/analytics.hpp"
#include "attention/estimation.hpp"
#include "attention/io.hpp"
#include "attention/model.hpp"
#include "attention/simulator.hpp"
#include "attention/strategies.hpp"

namespace {

using namespace attention;

std::vector<double> parse_grid(const std::string& spec) {
    // "lo:hi:step" inclusive of endpoints (to half-step tolerance)
    double lo, hi, step;
    char c1, c2;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
        throw CLI::ValidationError("range", "expected lo:hi:step with step > 0, got '" + spec + "'");
    std::vector<double> grid;
    for (double v = lo; v <= hi + step * 0.5; v += step)
        grid.push_back(v);
    if (grid.empty())
        throw CLI::ValidationError("range", "empty range '" + spec + "'");
    return grid;
}

std::pair<double, double> parse_box(const std::string& spec) {
    double lo, hi;
    char c;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c >> hi) || c != ':' || !(lo <= hi))
        throw CLI::ValidationError("box", "expected lo:hi with lo <= hi, got '" + spec + "'");
    return {lo, hi};
}

struct OutputSink {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file)
                throw std::runtime_error("cannot open output file '" + path + "'");
            stream = &file;
        }
    }
    std::ostream& out() { return *stream; }
};

struct CommonSimFlags {
    double alpha = 0.4;
    double beta = 0.4;
    std::uint64_t steps = 100000;
    std::optional<std::uint64_t> seed;
    std::size_t slots = 15;
    double step_minutes = 5.0;
    double arrival_interval = 20.0;
    double noise_std = 0.5;
    std::string strategy = "novelty";
    std::string positions_file;
    std::string format = "csv";
    std::string out_path;

    void add_to(CLI::App& cmd, bool with_strategy = true) {
        if (with_strategy)
            cmd.add_option("--strategy", strategy,
                           "Ranking strategy: novelty, popularity, greedy or weighted:<w>")
                ->capture_default_str();
        cmd.add_option("--alpha", alpha, "Novelty decay scale")->capture_default_str();
        cmd.add_option("--beta", beta, "Novelty decay exponent, in (0, 1]")->capture_default_str();
        cmd.add_option("--steps", steps, "Number of simulation steps")->capture_default_str();
        cmd.add_option("--seed", seed, "RNG seed (omit to draw from entropy)");
        cmd.add_option("--slots", slots, "Front-page slots m")->capture_default_str();
        cmd.add_option("--step-minutes", step_minutes, "Refresh step in minutes")
            ->capture_default_str();
        cmd.add_option("--arrival-interval", arrival_interval,
                       "Mean minutes between story arrivals (inf disables)")
            ->capture_default_str();
        cmd.add_option("--noise-std", noise_std, "Noise standard deviation")
            ->capture_default_str();
        cmd.add_option("--positions-file", positions_file,
                       "CSV position profile (header position,factor)");
        cmd.add_option("--format", format, "Output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        cmd.add_option("--out", out_path, "Output path (default stdout)");
    }

    std::uint64_t resolve_seed() {
        if (!seed) {
            seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^
                   std::random_device{}();
            std::cerr << "seed: " << *seed << "\n";
        }
        return *seed;
    }

    SimConfig build() {
        SimConfig config;
        config.decay = DecayLaw(alpha, beta);
        config.slots = slots;
        config.step_minutes = step_minutes;
        config.arrival_interval_minutes = arrival_interval;
        config.steps = steps;
        config.noise = NoiseLaw(noise_std);
        config.strategy = IndexStrategy::parse(strategy);
        config.seed = resolve_seed();
        if (!positions_file.empty()) {
            std::ifstream in(positions_file);
            if (!in)
                throw std::runtime_error("cannot open positions file '" + positions_file + "'");
            config.positions = PositionProfile::from_csv(in);
        } else {
            config.positions = PositionProfile::digg_default(slots);
        }
        config.validate();
        return config;
    }
};

int cmd_simulate(CommonSimFlags& flags) {
    const SimConfig config = flags.build();
    const RunSummary summary = run(config);
    OutputSink sink(flags.out_path);
    if (flags.format == "json")
        sink.out() << run_to_json(config, summary).dump(2) << "\n";
    else
        write_run_csv(sink.out(), config, summary);
    return 0;
}

struct SweepFlags {
    std::string beta_range = "0.30:0.45:0.01";
    std::string strategies = "novelty,popularity,greedy";
    std::size_t num_seeds = 5;
    bool detect_crossing = false;
};

std::vector<IndexStrategy> parse_strategies(const std::string& csv) {
    std::vector<IndexStrategy> out;
    std::istringstream ss(csv);
    std::string name;
    while (std::getline(ss, name, ','))
        out.push_back(IndexStrategy::parse(name));
    if (out.empty())
        throw CLI::ValidationError("--strategies", "no strategies given");
    return out;
}

// Median total per (beta, strategy); bracket where novelty first beats
// every other strategy's median.
std::optional<std::pair<double, double>> crossing_bracket(
    const std::vector<SweepRow>& rows, const std::vector<double>& betas) {
    std::map<std::pair<double, std::string>, std::vector<double>> cells;
    for (const auto& row : rows)
        cells[{row.beta, row.strategy.name()}].push_back(row.total_diggs);
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    auto novelty_wins = [&](double beta) -> std::optional<bool> {
        auto it = cells.find({beta, "novelty"});
        if (it == cells.end())
            return std::nullopt;
        const double nov = median(it->second);
        for (const auto& [key, totals] : cells)
            if (key.first == beta && key.second != "novelty" && median(totals) >= nov)
                return false;
        return true;
    };
    for (std::size_t i = 0; i + 1 < betas.size(); ++i) {
        const auto lo = novelty_wins(betas[i]);
        const auto hi = novelty_wins(betas[i + 1]);
        if (lo && hi && !*lo && *hi)
            return std::make_pair(betas[i], betas[i + 1]);
    }
    return std::nullopt;
}

int cmd_sweep(CommonSimFlags& flags, SweepFlags& sw) {
    SimConfig base = flags.build();
    const auto betas = parse_grid(sw.beta_range);
    for (double b : betas)
        DecayLaw(base.decay.alpha, b);  // validate the grid up front
    const auto strategies = parse_strategies(sw.strategies);
    const auto rows = sweep(base, betas, strategies, sw.num_seeds);
    OutputSink sink(flags.out_path);
    if (flags.format == "json") {
        nlohmann::json j = {{"rows", sweep_to_json(rows)}};
        if (sw.detect_crossing) {
            const auto bracket = crossing_bracket(rows, betas);
            j["novelty_crossing_bracket"] =
                bracket ? nlohmann::json({bracket->first, bracket->second})
                        : nlohmann::json(nullptr);
        }
        sink.out() << j.dump(2) << "\n";
    } else {
        write_sweep_csv(sink.out(), rows);
        if (sw.detect_crossing) {
            const auto bracket = crossing_bracket(rows, betas);
            if (bracket)
                sink.out() << "# novelty_crossing_bracket," << format_double(bracket->first)
                           << ',' << format_double(bracket->second) << '\n';
            else
                sink.out() << "# novelty_crossing_bracket,none\n";
        }
    }
    return 0;
}

struct PhaseFlags {
    std::string alpha_range = "0.1:1.0:0.05";
    double abar = 0.08;
    std::size_t slots = 15;
    double arrival_interval = 20.0;
    double horizon = 50000.0;
    bool classify = false;
    std::string format = "csv";
    std::string out_path;
};

int cmd_phase(PhaseFlags& flags) {
    CriticalParams params{flags.abar, flags.slots, flags.arrival_interval, flags.horizon};
    params.validate();
    const auto alphas = parse_grid(flags.alpha_range);
    const PhaseDiagram diagram = phase_diagram(alphas, params);
    OutputSink sink(flags.out_path);
    if (flags.format == "json")
        sink.out() << phase_to_json(diagram).dump(2) << "\n";
    else if (flags.classify)
        write_phase_points_csv(sink.out(), diagram);
    else
        write_phase_curve_csv(sink.out(), diagram);
    return 0;
}

struct FitFlags {
    std::string input;
    std::string alpha_box = "0.05:1.0";
    std::string beta_box = "0.1:1.0";
    std::size_t grid = 41;
    std::string out_path;
};

int cmd_fit(FitFlags& flags) {
    std::vector<SamplePoint> samples;
    if (flags.input.empty() || flags.input == "-") {
        samples = load_samples(std::cin);
    } else {
        std::ifstream in(flags.input);
        if (!in)
            throw std::runtime_error("cannot open samples file '" + flags.input + "'");
        samples = load_samples(in);
    }
    const FitResult fit =
        fit_decay(samples, parse_box(flags.alpha_box), parse_box(flags.beta_box), flags.grid);
    OutputSink sink(flags.out_path);
    sink.out() << fit_to_json(fit).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ranked-page attention simulator and analytics"};
    app.require_subcommand(1);
    // keys live in a section per subcommand, e.g. [simulate] alpha=0.5,
    // or dotted (simulate.alpha=0.5); explicit flags win
    app.set_config("--config", "", "Key-value config file, overridden by flags");

    CommonSimFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run one simulation");
    sim_flags.add_to(*simulate);

    CommonSimFlags sweep_base;
    SweepFlags sweep_flags;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a (beta, strategy, seed) grid");
    sweep_base.steps = 10000;
    sweep_base.add_to(*sweep_cmd, /*with_strategy=*/false);
    sweep_cmd->add_option("--beta-range", sweep_flags.beta_range, "Grid lo:hi:step")
        ->capture_default_str();
    sweep_cmd->add_option("--strategies", sweep_flags.strategies, "Comma-separated strategies")
        ->capture_default_str();
    sweep_cmd->add_option("--seeds", sweep_flags.num_seeds, "Seeds per grid cell")
        ->capture_default_str();
    sweep_cmd->add_flag("--detect-crossing", sweep_flags.detect_crossing,
                        "Append the beta bracket where novelty overtakes the rest");

    PhaseFlags phase_flags;
    auto* phase = app.add_subcommand("phase", "Analytic critical curve and classification");
    phase->add_option("--alpha-range", phase_flags.alpha_range, "Grid lo:hi:step")
        ->capture_default_str();
    phase->add_option("--abar", phase_flags.abar, "Mean position factor")->capture_default_str();
    phase->add_option("--slots", phase_flags.slots, "Front-page slots m")->capture_default_str();
    phase->add_option("--arrival-interval", phase_flags.arrival_interval,
                      "Mean minutes between arrivals s")
        ->capture_default_str();
    phase->add_option("--horizon", phase_flags.horizon, "Horizon T in minutes")
        ->capture_default_str();
    phase->add_flag("--classify", phase_flags.classify,
                    "Emit the (alpha, beta, residual, region) grid instead of the curve");
    phase->add_option("--format", phase_flags.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    phase->add_option("--out", phase_flags.out_path, "Output path (default stdout)");

    FitFlags fit_flags;
    auto* fit = app.add_subcommand("fit", "Fit (alpha, beta, a_i) from a click log");
    fit->add_option("input", fit_flags.input, "Samples CSV ('-' or empty for stdin)");
    fit->add_option("--alpha-range", fit_flags.alpha_box, "Search box lo:hi")
        ->capture_default_str();
    fit->add_option("--beta-range", fit_flags.beta_box, "Search box lo:hi")
        ->capture_default_str();
    fit->add_option("--grid", fit_flags.grid, "Grid points per axis")->capture_default_str();
    fit->add_option("--out", fit_flags.out_path, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(sim_flags);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_base, sweep_flags);
        if (phase->parsed())
            return cmd_phase(phase_flags);
        if (fit->parsed())
            return cmd_fit(fit_flags);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
