#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace attention {

// Digg counts are kept strictly positive so logarithms stay defined.
inline constexpr double kMinDiggs = 1e-6;

/// Stretched-exponential novelty decay r_t = exp(-alpha * t^beta).
struct DecayLaw {
    double alpha = 0.4;
    double beta = 0.4;

    DecayLaw() = default;
    DecayLaw(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
        if (alpha < 0.0)
            throw std::invalid_argument("DecayLaw: alpha must be >= 0");
        if (!(beta > 0.0 && beta <= 1.0))
            throw std::invalid_argument("DecayLaw: beta must be in (0, 1]");
    }
};

/// Novelty factor at lifetime t (minutes). novelty(0) == 1 exactly.
inline double novelty(const DecayLaw& decay, double t) {
    if (t < 0.0)
        throw std::invalid_argument("novelty: negative lifetime");
    if (t == 0.0)
        return 1.0;
    return std::exp(-decay.alpha * std::pow(t, decay.beta));
}

/// Per-slot growth attenuation a_1..a_m, a_i nonincreasing, all positive.
class PositionProfile {
public:
    explicit PositionProfile(std::vector<double> factors)
        : factors_(std::move(factors)) {
        if (factors_.empty())
            throw std::invalid_argument("PositionProfile: no factors");
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            if (!(factors_[i] > 0.0))
                throw std::invalid_argument("PositionProfile: factors must be positive");
            if (i > 0 && factors_[i] > factors_[i - 1])
                throw std::invalid_argument("PositionProfile: factors must be nonincreasing");
        }
    }

    const std::vector<double>& factors() const { return factors_; }
    std::size_t slots() const { return factors_.size(); }
    double factor(std::size_t slot_1based) const { return factors_.at(slot_1based - 1); }

    double abar() const {
        return std::accumulate(factors_.begin(), factors_.end(), 0.0) /
               static_cast<double>(factors_.size());
    }

    /// Uniform profile a_i = a for every slot.
    static PositionProfile uniform(std::size_t slots, double a) {
        return PositionProfile(std::vector<double>(slots, a));
    }

    /// Default profile calibrated to the measured digg.com values:
    /// a_1 = 0.120, a_2 = 0.106, page mean 0.08. The shape is
    /// a_i = u + v * rho^(i-1) with rho found by bisection on the mean;
    /// if no such rho exists in (0, 1), a linear ramp clamped at 0.01 and
    /// rescaled to the target mean is used instead.
    static PositionProfile digg_default(std::size_t slots = 15,
                                        double a1 = 0.120, double a2 = 0.106,
                                        double mean = 0.08) {
        if (slots == 1)
            return uniform(1, mean);
        const double m = static_cast<double>(slots);
        auto mean_of = [&](double rho) {
            const double v = (a1 - a2) / (1.0 - rho);
            const double u = a1 - v;
            // u + v * (1 + rho + ... + rho^(m-1)) / m
            const double s = (1.0 - std::pow(rho, m)) / (1.0 - rho);
            return u + v * s / m;
        };
        double lo = 1e-3, hi = 1.0 - 1e-3;
        if ((mean_of(lo) - mean) * (mean_of(hi) - mean) < 0.0) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((mean_of(lo) - mean) * (mean_of(mid) - mean) <= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            const double rho = 0.5 * (lo + hi);
            const double v = (a1 - a2) / (1.0 - rho);
            const double u = a1 - v;
            std::vector<double> f(slots);
            for (std::size_t i = 0; i < slots; ++i)
                f[i] = u + v * std::pow(rho, static_cast<double>(i));
            return PositionProfile(std::move(f));
        }
        // fallback: linear ramp from a1, clamped, rescaled to the mean
        std::vector<double> f(slots);
        for (std::size_t i = 0; i < slots; ++i)
            f[i] = std::max(0.01, a1 - (a1 - a2) * static_cast<double>(i));
        const double cur = std::accumulate(f.begin(), f.end(), 0.0) / m;
        for (double& x : f)
            x *= mean / cur;
        return PositionProfile(std::move(f));
    }

    /// Parse a profile from CSV with header `position,factor`,
    /// positions 1..m contiguous.
    static PositionProfile from_csv(std::istream& in) {
        std::string line;
        if (!std::getline(in, line) || line.rfind("position,factor", 0) != 0)
            throw std::runtime_error("position profile: expected header 'position,factor'");
        std::vector<double> f;
        std::size_t row = 1;
        while (std::getline(in, line)) {
            ++row;
            if (line.empty())
                continue;
            std::istringstream ss(line);
            std::string pos_s, fac_s;
            if (!std::getline(ss, pos_s, ',') || !std::getline(ss, fac_s))
                throw std::runtime_error("position profile: malformed row " + std::to_string(row));
            std::size_t pos = 0;
            double fac = 0.0;
            try {
                pos = std::stoul(pos_s);
                fac = std::stod(fac_s);
            } catch (const std::exception&) {
                throw std::runtime_error("position profile: nonnumeric field in row " +
                                         std::to_string(row));
            }
            if (pos != f.size() + 1)
                throw std::runtime_error("position profile: positions must be 1..m contiguous (row " +
                                         std::to_string(row) + ")");
            f.push_back(fac);
        }
        return PositionProfile(std::move(f));
    }

private:
    std::vector<double> factors_;
};

/// Multiplicative noise X_t: Normal with mean pinned at 1.
struct NoiseLaw {
    static constexpr double mean = 1.0;
    double std = 0.5;

    NoiseLaw() = default;
    explicit NoiseLaw(double std_) : std(std_) {
        if (std < 0.0)
            throw std::invalid_argument("NoiseLaw: std must be >= 0");
    }
};

/// One story: the state vector (N_t, t) plus a creation ordinal.
struct StoryState {
    std::uint64_t id = 0;
    double diggs = 1.0;
    double birth_time = 0.0;  // minutes since simulation start

    double lifetime(double now) const { return now - birth_time; }
};

/// Digg increment over one step: dt * a_i * r * x * N.
/// May be negative when the noise draw is.
inline double growth_increment(double n, double a_i, double r, double x, double dt) {
    if (!(n > 0.0))
        throw std::invalid_argument("growth_increment: diggs must be positive");
    if (!(dt > 0.0))
        throw std::invalid_argument("growth_increment: dt must be positive");
    return dt * a_i * r * x * n;
}

/// Logarithmic growth rate per minute: (ln n_after - ln n_before) / dt.
inline double log_growth_rate(double n_before, double n_after, double dt) {
    if (!(n_before > 0.0) || !(n_after > 0.0))
        throw std::invalid_argument("log_growth_rate: digg counts must be positive");
    if (!(dt > 0.0))
        throw std::invalid_argument("log_growth_rate: dt must be positive");
    return (std::log(n_after) - std::log(n_before)) / dt;
}

}  // namespace attention
