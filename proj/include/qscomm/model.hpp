#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qscomm/errors.hpp"

namespace qscomm {

// ---------------------------------------------------------------------------
// Density schedules: prescribed population densities rho(t).
// ---------------------------------------------------------------------------

// rho(t) = rho_minus * (rho_plus / rho_minus)^(t/T) for t in [0, T], clamped
// to rho_plus afterwards (log-linear growth).
struct ExpRamp {
    double rho_minus, rho_plus, duration;
};

struct StepChange {
    double rho_before, rho_after, t_switch;
};

// rho(t) = rho_minus + (rho_plus - rho_minus) / (1 + exp(-steepness*(t - midpoint)))
struct LogisticRamp {
    double rho_minus, rho_plus, midpoint, steepness;
};

// Knots (t, rho) with strictly increasing t; evaluation interpolates linearly
// in log-density and clamps outside the knot range.
struct PiecewiseLog {
    std::vector<std::pair<double, double>> knots;
};

class DensitySchedule {
public:
    using Variant = std::variant<ExpRamp, StepChange, LogisticRamp, PiecewiseLog>;

    static DensitySchedule exp_ramp(double rho_minus, double rho_plus, double duration);
    static DensitySchedule step(double rho_before, double rho_after, double t_switch);
    static DensitySchedule logistic(double rho_minus, double rho_plus, double midpoint,
                                    double steepness);
    static DensitySchedule piecewise(std::vector<std::pair<double, double>> knots);
    static DensitySchedule constant(double rho) { return step(rho, rho, 0.0); }

    const Variant& variant() const { return v_; }

private:
    explicit DensitySchedule(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

double density_at(const DensitySchedule& schedule, double t);

// ---------------------------------------------------------------------------
// Parameter blocks
// ---------------------------------------------------------------------------

struct SpeciesParams {
    std::string name = "species";
    double delta = 1.0 / 1800.0;   // basal MP degradation rate [1/s]
    double mu_g_coeff = 0.0;       // growth dilution: mu_g(rho) = mu_g_coeff * rho
    double k_resp = 1.0;           // maximum MP synthesis rate [conc/s]
    double K_A = 0.5;              // Hill half-saturation [conc]
    double n = 2.0;                // Hill coefficient, >= 1
    double alpha_luxs = 0.1;       // constant per-cell AI secretion rate
    double sigma_m = 0.1;          // intrinsic MP noise (variance rate; term sqrt(2*sigma_m) dW)
    double mu_scale = 1.0;         // production scaling mu(rho_B, rho_F), constant factor
    int n_cells = 100;
    DensitySchedule density_schedule = DensitySchedule::exp_ramp(1e-4, 1.0, 1800.0);

    void validate() const;  // throws ConfigError naming the offending field
};

struct EnvironmentParams {
    double k_out = 0.1;     // environmental AI loss rate [1/s]
    double mu_gut = 0.0;    // gut clearance rate [1/s]
    double sigma_a = 0.1;   // extrinsic AI noise amplitude
    double volume = 200.0;  // system volume V; rho*V is the effective cell count

    void validate() const;
};

// Production scaling mu(rho_B, rho_F). Constant today; the density arguments
// keep the call sites stable if a density-dependent form is ever added.
inline double production_scale(const SpeciesParams& p, double /*rho_b*/, double /*rho_f*/) {
    return p.mu_scale;
}

// Hill activation f_m(a) = k_resp * a^n / (K_A^n + a^n); in [0, k_resp].
double hill_activation(double a, const SpeciesParams& p);

// tau_m = 1 / (delta + mu_g_coeff * rho_total)
double monitor_time_constant(const SpeciesParams& p, double rho_total);

// tau_a = 1 / (k_out + mu_gut)
double ai_time_constant(const EnvironmentParams& env);

// Constant per-cell secretion f_ext(m) = alpha_luxs (m unused by the model).
inline double secretion_rate(const SpeciesParams& p, double /*m*/) { return p.alpha_luxs; }

// ---------------------------------------------------------------------------
// Simulation configuration. Species index 0 is population 1 (Firmicutes in
// the bundled configs), index 1 is population 2 (Bacteroidetes).
// ---------------------------------------------------------------------------

struct SimConfig {
    std::array<SpeciesParams, 2> species{};
    EnvironmentParams env{};
    double dt = 0.01;
    double t_max = 1800.0;
    int record_stride = 100;
    std::uint64_t seed = 42;
    double a0 = 0.0;
    double m0 = 0.01;

    // Stored for config fidelity; not referenced by the model equations.
    double gamma = 0.0;
    double v_avg = 1e-18;

    // Recording-footprint cap checked before a run starts.
    std::uint64_t memory_cap_bytes = 4ull << 30;

    void validate() const;

    long n_steps() const;                   // floor(t_max / dt), integer-safe
    long n_samples() const;                 // recorded samples incl. t = 0
    std::uint64_t recording_bytes() const;  // trajectory footprint estimate
};

// ---------------------------------------------------------------------------
// Trajectory: recorded series. All series share length n_samples().
// ---------------------------------------------------------------------------

struct Trajectory {
    std::vector<double> times;
    std::array<std::vector<double>, 2> rho;
    std::vector<double> a;
    std::array<std::vector<std::vector<double>>, 2> m;  // [species][cell][sample]
    std::array<std::vector<double>, 2> m_mean;

    std::size_t n_samples() const { return times.size(); }
};

}  // namespace qscomm
