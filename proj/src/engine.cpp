#include "qscomm/engine.hpp"

#include <cmath>
#include <string>

#include "qscomm/parallel.hpp"

namespace qscomm {

Simulation::Simulation(const SimConfig& cfg, SimOptions opts)
    : cfg_(cfg), opts_(std::move(opts)) {
    cfg_.validate();
    state_.t = 0.0;
    state_.a = cfg_.a0;
    for (int s = 0; s < 2; ++s) {
        const auto& sp = cfg_.species[s];
        state_.rho[s] = density_at(sp.density_schedule, 0.0);
        state_.m[s].assign(static_cast<std::size_t>(sp.n_cells), cfg_.m0);
        mp_keys_[s].resize(static_cast<std::size_t>(sp.n_cells));
        for (int c = 0; c < sp.n_cells; ++c)
            mp_keys_[s][static_cast<std::size_t>(c)] =
                noise_key(cfg_.seed, NoiseKind::Mp, static_cast<std::uint64_t>(s),
                          static_cast<std::uint64_t>(c));
        mp_noise_amp_[s] = std::sqrt(2.0 * sp.sigma_m * cfg_.dt);
    }
    ai_key_ = noise_key(cfg_.seed, NoiseKind::Ai, 0, 0);
    t_start_ = 0.0;
    tau_a_ = ai_time_constant(cfg_.env);
    ai_noise_scale_ =
        std::sqrt(2.0 * cfg_.env.sigma_a * cfg_.env.sigma_a * cfg_.dt / cfg_.env.volume);
    steps_taken_ = opts_.step_offset;
}

void Simulation::step_once() {
    const double dt = cfg_.dt;
    const std::uint64_t step = steps_taken_;
    const StepSalt salt = step_salt(step);
    // Densities first, evaluated at the end of the step. Time comes from the
    // step index so 180k steps accumulate no floating-point drift.
    const double t_next =
        t_start_ + static_cast<double>(step - opts_.step_offset + 1) * dt;
    state_.rho[0] = density_at(cfg_.species[0].density_schedule, t_next);
    state_.rho[1] = density_at(cfg_.species[1].density_schedule, t_next);
    const double rho_total = state_.rho[0] + state_.rho[1];

    // Shared autoinducer. Per-cell secretion is constant (f_ext == alpha_luxs),
    // so the pre-update cell mean reduces to alpha_luxs exactly.
    double drift = -state_.a / tau_a_;
    drift += state_.rho[0] * cfg_.species[0].alpha_luxs;
    drift += state_.rho[1] * cfg_.species[1].alpha_luxs;
    if (opts_.a_forcing) drift += opts_.a_forcing(state_.t);
    const double ai_noise =
        ai_noise_scale_ * std::sqrt(rho_total) * gaussian_increment(ai_key_, salt);
    state_.a += dt * drift + ai_noise;
    if (state_.a < 0.0) state_.a = 0.0;

    // Monitor proteins, driven by the post-update autoinducer.
    for (int s = 0; s < 2; ++s) {
        const auto& sp = cfg_.species[s];
        const double inv_tau_m = sp.delta + sp.mu_g_coeff * rho_total;
        const double production =
            production_scale(sp, state_.rho[1], state_.rho[0]) * hill_activation(state_.a, sp);
        const double prod_dt = production * dt;
        const double amp = mp_noise_amp_[s];
        auto& m = state_.m[s];
        const auto& keys = mp_keys_[s];
        double sum = 0.0;
        for (std::size_t c = 0; c < m.size(); ++c) {
            double v = m[c];
            v += dt * (-v * inv_tau_m) + prod_dt + amp * gaussian_increment(keys[c], salt);
            if (v < 0.0) v = 0.0;
            m[c] = v;
            sum += v;
        }
        if (!std::isfinite(sum)) {
            check_finite();  // identifies the offending cell
        }
    }
    if (!std::isfinite(state_.a))
        throw NumericalError("non-finite autoinducer value at step " + std::to_string(step));

    state_.t = t_next;
    ++steps_taken_;
}

void Simulation::run(long steps) {
    for (long i = 0; i < steps; ++i) step_once();
}

void Simulation::set_state(const SimState& st) {
    if (steps_taken_ != opts_.step_offset)
        throw NumericalError("set_state called after stepping");
    if (st.m[0].size() != state_.m[0].size() || st.m[1].size() != state_.m[1].size())
        throw ConfigError("set_state: cell counts do not match the configuration");
    state_ = st;
    t_start_ = st.t;
}

void Simulation::check_finite() const {
    for (int s = 0; s < 2; ++s)
        for (std::size_t c = 0; c < state_.m[s].size(); ++c)
            if (!std::isfinite(state_.m[s][c]))
                throw NumericalError("non-finite monitor protein m[" +
                                     cfg_.species[s].name + "][" + std::to_string(c) +
                                     "] at step " + std::to_string(steps_taken_));
    if (!std::isfinite(state_.a))
        throw NumericalError("non-finite autoinducer value at step " +
                             std::to_string(steps_taken_));
}

Trajectory simulate(const SimConfig& cfg, const SimOptions& opts) {
    Simulation sim(cfg, opts);
    const long steps = cfg.n_steps();
    const long stride = cfg.record_stride;
    const long samples = cfg.n_samples();

    Trajectory traj;
    traj.times.reserve(static_cast<std::size_t>(samples));
    traj.a.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < 2; ++s) {
        traj.rho[s].reserve(static_cast<std::size_t>(samples));
        traj.m_mean[s].reserve(static_cast<std::size_t>(samples));
        traj.m[s].assign(static_cast<std::size_t>(cfg.species[s].n_cells), {});
        for (auto& cell : traj.m[s]) cell.reserve(static_cast<std::size_t>(samples));
    }

    auto record = [&](const SimState& st) {
        traj.times.push_back(st.t);
        traj.a.push_back(st.a);
        for (int s = 0; s < 2; ++s) {
            traj.rho[s].push_back(st.rho[s]);
            double sum = 0.0;
            const auto& m = st.m[s];
            for (std::size_t c = 0; c < m.size(); ++c) {
                traj.m[s][c].push_back(m[c]);
                sum += m[c];
            }
            traj.m_mean[s].push_back(sum / static_cast<double>(m.size()));
        }
    };

    record(sim.state());
    for (long i = 1; i <= steps; ++i) {
        sim.step_once();
        if (i % stride == 0) record(sim.state());
    }
    return traj;
}

std::vector<Trajectory> run_replicates(const SimConfig& cfg, int n_reps, int n_threads) {
    if (n_reps < 1) throw ConfigError("n_reps must be >= 1");
    cfg.validate();
    std::vector<Trajectory> out(static_cast<std::size_t>(n_reps));
    parallel_for(static_cast<std::size_t>(n_reps), n_threads, [&](std::size_t r) {
        SimConfig rep_cfg = cfg;
        rep_cfg.seed = cfg.seed ^ static_cast<std::uint64_t>(r);
        out[r] = simulate(rep_cfg);
    });
    return out;
}

}  // namespace qscomm
