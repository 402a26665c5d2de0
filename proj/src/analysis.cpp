#include "qscomm/analysis.hpp"

#include <cmath>

#include "qscomm/config_io.hpp"
#include "qscomm/engine.hpp"
#include "qscomm/errors.hpp"

namespace qscomm {

using nlohmann::json;

namespace {

struct PooledSeries {
    std::vector<double> a;
    std::array<std::vector<double>, 2> m_mean;
    std::array<std::vector<double>, 2> rho;
    // Per-replicate views for boundary-respecting embeddings.
    std::vector<std::size_t> rep_offsets;  // start of each replicate block
    std::size_t rep_len = 0;
};

PooledSeries pool_series(const std::vector<Trajectory>& reps, double burn_in_frac) {
    PooledSeries p;
    const std::size_t ns = reps.front().n_samples();
    const std::size_t i0 =
        static_cast<std::size_t>(burn_in_frac * static_cast<double>(ns - 1));
    p.rep_len = ns - i0;
    for (const auto& tr : reps) {
        p.rep_offsets.push_back(p.a.size());
        p.a.insert(p.a.end(), tr.a.begin() + static_cast<std::ptrdiff_t>(i0), tr.a.end());
        for (int s = 0; s < 2; ++s) {
            p.m_mean[s].insert(p.m_mean[s].end(),
                               tr.m_mean[s].begin() + static_cast<std::ptrdiff_t>(i0),
                               tr.m_mean[s].end());
            p.rho[s].insert(p.rho[s].end(),
                            tr.rho[s].begin() + static_cast<std::ptrdiff_t>(i0),
                            tr.rho[s].end());
        }
    }
    return p;
}

json mi_to_json(const MIEstimate& e) {
    return {{"bits", e.bits},     {"ci_low", e.ci_low},       {"ci_high", e.ci_high},
            {"k", e.k},           {"n_samples", e.n_samples}, {"block_len", e.block_len}};
}

// Pooled (a_t, m_cell_t) pairs across cells and replicates, deterministically
// subsampled to the cap.
std::pair<std::vector<double>, std::vector<double>> pooled_cell_pairs(
    const std::vector<Trajectory>& reps, int species, double burn_in_frac, std::size_t cap) {
    const std::size_t ns = reps.front().n_samples();
    const std::size_t i0 =
        static_cast<std::size_t>(burn_in_frac * static_cast<double>(ns - 1));
    const std::size_t per_cell = ns - i0;
    const std::size_t n_cells = reps.front().m[species].size();
    const std::size_t total = reps.size() * n_cells * per_cell;
    const std::size_t stride = std::max<std::size_t>(1, (total + cap - 1) / cap);
    std::vector<double> xs, ys;
    xs.reserve(total / stride + 1);
    ys.reserve(total / stride + 1);
    std::size_t flat = 0;
    for (const auto& tr : reps)
        for (std::size_t c = 0; c < n_cells; ++c)
            for (std::size_t t = i0; t < ns; ++t, ++flat)
                if (flat % stride == 0) {
                    xs.push_back(tr.a[t]);
                    ys.push_back(tr.m[species][c][t]);
                }
    return {std::move(xs), std::move(ys)};
}

json noise_to_json(const NoiseSplit& n) {
    return {{"intrinsic_frac", n.intrinsic_frac},
            {"extrinsic_frac", n.extrinsic_frac},
            {"intrinsic_var", n.intrinsic_var},
            {"extrinsic_var", n.extrinsic_var}};
}

}  // namespace

SimConfig stationary_control_config(const SimConfig& base) {
    SimConfig cfg = base;
    double rho_total = 0.0;
    std::array<double, 2> rho{};
    for (int s = 0; s < 2; ++s) {
        rho[s] = density_at(base.species[s].density_schedule, base.t_max);
        rho_total += rho[s];
        cfg.species[s].density_schedule = DensitySchedule::constant(rho[s]);
    }
    const double a_ss = ai_time_constant(base.env) *
                        (rho[0] * base.species[0].alpha_luxs +
                         rho[1] * base.species[1].alpha_luxs);
    cfg.a0 = a_ss;
    // Single scalar m0: use the slower species' fixed point; the horizon
    // below lets both species and the noise statistics settle.
    double m0 = 0.0;
    for (int s = 0; s < 2; ++s)
        m0 = std::max(m0, monitor_time_constant(base.species[s], rho_total) *
                              production_scale(base.species[s], rho[1], rho[0]) *
                              hill_activation(a_ss, base.species[s]));
    cfg.m0 = m0;
    double tau_slow = ai_time_constant(base.env);
    for (int s = 0; s < 2; ++s)
        tau_slow = std::max(tau_slow, monitor_time_constant(base.species[s], rho_total));
    cfg.t_max = 2.5 * tau_slow;
    return cfg;
}

json analyze(const SimConfig& cfg, const std::set<std::string>& analyses,
             const AnalysisOptions& opts) {
    if (analyses.empty()) throw ConfigError("no analyses requested");
    const std::set<std::string> known{"mi", "cross", "te", "noise"};
    for (const auto& a : analyses)
        if (known.find(a) == known.end())
            throw ConfigError("unknown analysis '" + a + "'; valid: mi, cross, te, noise");
    cfg.validate();

    json out;
    out["config_hash"] = config_hash(cfg);
    out["seed"] = cfg.seed;
    out["settings"] = {{"n_reps", opts.n_reps},
                       {"k", opts.k},
                       {"burn_in_frac", opts.burn_in_frac},
                       {"te_lag", opts.te_lag},
                       {"max_pooled_samples", opts.max_pooled_samples},
                       {"n_boot", opts.n_boot},
                       {"alpha", opts.alpha},
                       {"boot_seed", opts.boot_seed}};

    const auto reps = run_replicates(cfg, opts.n_reps, opts.n_threads);
    const PooledSeries pooled = pool_series(reps, opts.burn_in_frac);

    if (analyses.count("mi")) {
        json mi;
        for (int s = 0; s < 2; ++s) {
            const std::string pop = s == 0 ? "pop1" : "pop2";
            MIEstimate avg = ksg_mi_with_ci(pooled.a, pooled.m_mean[s], opts.k, opts.block_len,
                                            opts.n_boot, opts.alpha, opts.boot_seed,
                                            opts.n_threads);
            mi[pop + "_avg"] = mi_to_json(avg);
            auto [xs, ys] =
                pooled_cell_pairs(reps, s, opts.burn_in_frac, opts.max_pooled_samples);
            MIEstimate cells = ksg_mi_with_ci(xs, ys, opts.k, opts.block_len, opts.n_boot,
                                              opts.alpha, opts.boot_seed, opts.n_threads);
            mi[pop + "_cells"] = mi_to_json(cells);
        }
        out["mi"] = mi;
    }

    if (analyses.count("cross")) {
        json cross;
        MIEstimate m1r2 = ksg_mi_with_ci(pooled.m_mean[0], pooled.rho[1], opts.k, opts.block_len,
                                         opts.n_boot, opts.alpha, opts.boot_seed, opts.n_threads);
        MIEstimate m2r1 = ksg_mi_with_ci(pooled.m_mean[1], pooled.rho[0], opts.k, opts.block_len,
                                         opts.n_boot, opts.alpha, opts.boot_seed, opts.n_threads);
        cross["I_m1_rho2"] = mi_to_json(m1r2);
        cross["I_m2_rho1"] = mi_to_json(m2r1);
        out["cross"] = cross;
    }

    if (analyses.count("te")) {
        std::vector<std::span<const double>> s1, s2;
        for (std::size_t r = 0; r < reps.size(); ++r) {
            const std::size_t off = pooled.rep_offsets[r];
            s1.emplace_back(pooled.m_mean[0].data() + off, pooled.rep_len);
            s2.emplace_back(pooled.m_mean[1].data() + off, pooled.rep_len);
        }
        const TransferEntropy te21 = transfer_entropy_pooled(s2, s1, opts.te_lag, opts.k);
        const TransferEntropy te12 = transfer_entropy_pooled(s1, s2, opts.te_lag, opts.k);
        out["te"] = {{"pop2_to_pop1", {{"bits_raw", te21.bits_raw}, {"bits", te21.bits}}},
                     {"pop1_to_pop2", {{"bits_raw", te12.bits_raw}, {"bits", te12.bits}}},
                     {"lag_samples", opts.te_lag}};
    }

    if (analyses.count("noise")) {
        json noise;
        for (int s = 0; s < 2; ++s) {
            const std::string pop = s == 0 ? "pop1" : "pop2";
            noise[pop] = noise_to_json(noise_decomposition(reps, s, opts.noise_window));
        }
        // Stationary controls isolate each noise pathway at the operating
        // point, where the shared deterministic drive is flat.
        NoiseWindow ctrl_window = opts.noise_window;
        ctrl_window.start_frac = 0.6;
        SimConfig ctrl_a = stationary_control_config(cfg);
        for (auto& sp : ctrl_a.species) sp.sigma_m = 0.0;
        SimConfig ctrl_m = stationary_control_config(cfg);
        ctrl_m.env.sigma_a = 0.0;
        const auto reps_a = run_replicates(ctrl_a, 2, opts.n_threads);
        const auto reps_m = run_replicates(ctrl_m, 2, opts.n_threads);
        for (int s = 0; s < 2; ++s) {
            const std::string pop = s == 0 ? "pop1" : "pop2";
            noise["control_sigma_m_zero"][pop] =
                noise_to_json(noise_decomposition(reps_a, s, ctrl_window));
            noise["control_sigma_a_zero"][pop] =
                noise_to_json(noise_decomposition(reps_m, s, ctrl_window));
        }
        out["noise"] = noise;
    }
    return out;
}

}  // namespace qscomm
