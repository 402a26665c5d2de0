#include "qscomm/model.hpp"

#include <algorithm>
#include <cmath>

namespace qscomm {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

DensitySchedule DensitySchedule::exp_ramp(double rho_minus, double rho_plus, double duration) {
    require(rho_minus > 0.0, "exp_ramp: rho_minus must be > 0");
    require(rho_plus > 0.0, "exp_ramp: rho_plus must be > 0");
    require(duration > 0.0, "exp_ramp: duration must be > 0");
    return DensitySchedule(ExpRamp{rho_minus, rho_plus, duration});
}

DensitySchedule DensitySchedule::step(double rho_before, double rho_after, double t_switch) {
    require(rho_before > 0.0, "step: rho_before must be > 0");
    require(rho_after > 0.0, "step: rho_after must be > 0");
    require(t_switch >= 0.0, "step: t_switch must be >= 0");
    return DensitySchedule(StepChange{rho_before, rho_after, t_switch});
}

DensitySchedule DensitySchedule::logistic(double rho_minus, double rho_plus, double midpoint,
                                          double steepness) {
    require(rho_minus > 0.0, "logistic: rho_minus must be > 0");
    require(rho_plus > 0.0, "logistic: rho_plus must be > 0");
    require(steepness > 0.0, "logistic: steepness must be > 0");
    return DensitySchedule(LogisticRamp{rho_minus, rho_plus, midpoint, steepness});
}

DensitySchedule DensitySchedule::piecewise(std::vector<std::pair<double, double>> knots) {
    require(knots.size() >= 2, "piecewise: need at least two knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        require(knots[i].second > 0.0, "piecewise: densities must be > 0");
        if (i > 0) require(knots[i].first > knots[i - 1].first,
                           "piecewise: knot times must be strictly increasing");
    }
    return DensitySchedule(PiecewiseLog{std::move(knots)});
}

double density_at(const DensitySchedule& schedule, double t) {
    return std::visit(
        [t](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ExpRamp>) {
                if (t >= s.duration) return s.rho_plus;
                const double frac = t / s.duration;
                return std::exp(std::log(s.rho_minus) +
                                frac * (std::log(s.rho_plus) - std::log(s.rho_minus)));
            } else if constexpr (std::is_same_v<T, StepChange>) {
                return t < s.t_switch ? s.rho_before : s.rho_after;
            } else if constexpr (std::is_same_v<T, LogisticRamp>) {
                const double z = -s.steepness * (t - s.midpoint);
                return s.rho_minus + (s.rho_plus - s.rho_minus) / (1.0 + std::exp(z));
            } else {
                const auto& knots = s.knots;
                if (t <= knots.front().first) return knots.front().second;
                if (t >= knots.back().first) return knots.back().second;
                auto it = std::upper_bound(
                    knots.begin(), knots.end(), t,
                    [](double v, const auto& kn) { return v < kn.first; });
                const auto& hi = *it;
                const auto& lo = *(it - 1);
                const double w = (t - lo.first) / (hi.first - lo.first);
                return std::exp((1.0 - w) * std::log(lo.second) + w * std::log(hi.second));
            }
        },
        schedule.variant());
}

void SpeciesParams::validate() const {
    const std::string tag = "species '" + name + "': ";
    require(delta > 0.0, tag + "delta must be > 0");
    require(mu_g_coeff >= 0.0, tag + "mu_g_coeff must be >= 0");
    require(k_resp >= 0.0, tag + "k_resp must be >= 0");
    require(K_A > 0.0, tag + "K_A must be > 0");
    require(n >= 1.0, tag + "n must be >= 1");
    require(alpha_luxs >= 0.0, tag + "alpha_luxs must be >= 0");
    require(sigma_m >= 0.0, tag + "sigma_m must be >= 0");
    require(mu_scale >= 0.0, tag + "mu_scale must be >= 0");
    require(n_cells >= 1, tag + "n_cells must be >= 1");
}

void EnvironmentParams::validate() const {
    require(k_out >= 0.0, "env: k_out must be >= 0");
    require(mu_gut >= 0.0, "env: mu_gut must be >= 0");
    require(k_out + mu_gut > 0.0, "env: k_out + mu_gut must be > 0 (finite AI lifetime)");
    require(sigma_a >= 0.0, "env: sigma_a must be >= 0");
    require(volume > 0.0, "env: volume must be > 0");
}

double hill_activation(double a, const SpeciesParams& p) {
    if (a <= 0.0) return 0.0;
    const double r = std::pow(a / p.K_A, p.n);
    return p.k_resp * r / (1.0 + r);
}

double monitor_time_constant(const SpeciesParams& p, double rho_total) {
    return 1.0 / (p.delta + p.mu_g_coeff * rho_total);
}

double ai_time_constant(const EnvironmentParams& env) {
    return 1.0 / (env.k_out + env.mu_gut);
}

void SimConfig::validate() const {
    for (const auto& sp : species) sp.validate();
    env.validate();
    require(dt > 0.0, "dt must be > 0");
    require(t_max >= 0.0, "t_max must be >= 0");
    require(record_stride >= 1, "record_stride must be >= 1");
    require(a0 >= 0.0, "a0 must be >= 0");
    require(m0 >= 0.0, "m0 must be >= 0");
    if (recording_bytes() > memory_cap_bytes)
        throw ConfigError("recording footprint " + std::to_string(recording_bytes()) +
                          " bytes exceeds memory_cap_bytes=" +
                          std::to_string(memory_cap_bytes));
}

long SimConfig::n_steps() const {
    // Tolerate t_max/dt sitting a hair below an integer.
    return static_cast<long>(std::floor(t_max / dt + 1e-9));
}

long SimConfig::n_samples() const { return n_steps() / record_stride + 1; }

std::uint64_t SimConfig::recording_bytes() const {
    const std::uint64_t ns = static_cast<std::uint64_t>(n_samples());
    const std::uint64_t cells =
        static_cast<std::uint64_t>(species[0].n_cells) + species[1].n_cells;
    // times + 2 rho + a + per-cell matrices + 2 means
    return ns * (1 + 2 + 1 + cells + 2) * sizeof(double);
}

}  // namespace qscomm
