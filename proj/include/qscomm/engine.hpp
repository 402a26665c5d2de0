#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "qscomm/model.hpp"
#include "qscomm/rng.hpp"

namespace qscomm {

struct SimState {
    double t = 0.0;
    std::array<double, 2> rho{};
    double a = 0.0;
    std::array<std::vector<double>, 2> m;
};

struct SimOptions {
    // Extra additive drift on a(t) [concentration/time]; used for sinusoidal
    // perturbation of the shared channel.
    std::function<double(double)> a_forcing;
    // Start the noise-stream step counter here (continuation runs).
    std::uint64_t step_offset = 0;
};

// Euler-Maruyama integrator for the coupled system: per step, densities are
// updated first, then the shared autoinducer, then every cell's monitor
// protein (which sees the post-update autoinducer). Concentrations are
// clamped at zero after each sub-update.
class Simulation {
public:
    Simulation(const SimConfig& cfg, SimOptions opts = {});

    void step_once();
    void run(long steps);

    const SimState& state() const { return state_; }
    // Seed the state for a continuation run (before any step is taken).
    void set_state(const SimState& st);
    std::uint64_t steps_taken() const { return steps_taken_; }
    const SimConfig& config() const { return cfg_; }

private:
    SimConfig cfg_;
    SimOptions opts_;
    SimState state_;
    std::uint64_t steps_taken_ = 0;
    double t_start_ = 0.0;

    std::uint64_t ai_key_;
    std::array<std::vector<std::uint64_t>, 2> mp_keys_;

    // Per-step precomputed amplitudes.
    double tau_a_;
    std::array<double, 2> mp_noise_amp_;
    double ai_noise_scale_;  // sqrt(2 * sigma_a^2 * dt / V); multiplied by sqrt(rho_total)

    void check_finite() const;
};

// Runs floor(t_max/dt) steps from the initial state and records every
// record_stride-th state (including t = 0). Identical config and seed give a
// bit-identical trajectory.
Trajectory simulate(const SimConfig& cfg, const SimOptions& opts = {});

// Replicate r runs with seed = cfg.seed ^ r. Results are independent of the
// worker count and of execution order.
std::vector<Trajectory> run_replicates(const SimConfig& cfg, int n_reps, int n_threads = 1);

}  // namespace qscomm
