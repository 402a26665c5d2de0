#include "qscomm/freq.hpp"

#include <cmath>
#include <complex>

#include "qscomm/errors.hpp"
#include "qscomm/parallel.hpp"

namespace qscomm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

struct Projection {
    std::complex<double> phasor;  // amplitude * exp(i*phase) for A*sin(wt + phase)
    double amplitude;
};

Projection project_bin(std::span<const double> v, double dt, double cycles_over_window) {
    const std::size_t n = v.size();
    const double w = kTwoPi * cycles_over_window / (static_cast<double>(n) * dt);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double sc = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) * dt;
        const double x = v[j] - mean;
        sc += x * std::cos(w * t);
        ss += x * std::sin(w * t);
    }
    sc *= 2.0 / static_cast<double>(n);
    ss *= 2.0 / static_cast<double>(n);
    // y = A*sin(wt + p): sin-projection = A*cos(p), cos-projection = A*sin(p).
    Projection out;
    out.phasor = std::complex<double>(ss, sc);  // A*cos(p) + i*A*sin(p) = A*e^{ip}
    out.amplitude = std::abs(out.phasor);
    return out;
}

}  // namespace

LockInResult lock_in(std::span<const double> values, double dt, double freq, int n_cycles) {
    if (values.size() < 8) throw ConfigError("lock_in: series too short");
    if (freq <= 0.0 || dt <= 0.0) throw ConfigError("lock_in: freq and dt must be > 0");
    if (n_cycles < 5) throw ConfigError("lock_in: need at least 5 cycles");

    const Projection main = project_bin(values, dt, static_cast<double>(n_cycles));
    LockInResult out;
    out.amplitude = main.amplitude;
    out.phase = std::arg(main.phasor);

    // Noise floor from adjacent Fourier bins of the same window.
    double noise = 0.0;
    int used = 0;
    for (int j : {-3, -2, 2, 3}) {
        const int c = n_cycles + j;
        if (c < 1) continue;
        noise += project_bin(values, dt, static_cast<double>(c)).amplitude;
        ++used;
    }
    out.noise_amp = used > 0 ? noise / used : 0.0;
    return out;
}

namespace {

struct OperatingPoint {
    SimConfig cfg;       // constant densities at their t_max values
    double a_ss = 0.0;   // deterministic steady state
    double tau_slow = 0.0;
};

OperatingPoint operating_point(const SimConfig& base) {
    OperatingPoint op;
    op.cfg = base;
    double rho_total = 0.0;
    std::array<double, 2> rho{};
    for (int s = 0; s < 2; ++s) {
        rho[s] = density_at(base.species[s].density_schedule, base.t_max);
        rho_total += rho[s];
        op.cfg.species[s].density_schedule = DensitySchedule::constant(rho[s]);
    }
    const double tau_a = ai_time_constant(base.env);
    op.a_ss = tau_a * (rho[0] * base.species[0].alpha_luxs + rho[1] * base.species[1].alpha_luxs);
    op.tau_slow = tau_a;
    for (int s = 0; s < 2; ++s)
        op.tau_slow = std::max(op.tau_slow, monitor_time_constant(base.species[s], rho_total));
    // Start at the deterministic fixed point so the relax run only has to
    // equilibrate the noise statistics.
    op.cfg.a0 = op.a_ss;
    op.cfg.m0 = 0.0;  // per-species steady values set via set_state below
    return op;
}

struct RelaxedState {
    SimState state;
    std::uint64_t steps;
};

RelaxedState relax(const OperatingPoint& op, std::uint64_t seed, double relax_time) {
    SimConfig cfg = op.cfg;
    cfg.seed = seed;
    Simulation sim(cfg);
    SimState st = sim.state();
    const double rho_total = st.rho[0] + st.rho[1];
    for (int s = 0; s < 2; ++s) {
        const auto& sp = cfg.species[s];
        const double m_ss = monitor_time_constant(sp, rho_total) *
                            production_scale(sp, st.rho[1], st.rho[0]) *
                            hill_activation(op.a_ss, sp);
        for (auto& v : st.m[s]) v = m_ss;
    }
    sim.set_state(st);
    const long steps = static_cast<long>(std::ceil(relax_time / cfg.dt));
    sim.run(steps);
    return {sim.state(), sim.steps_taken()};
}

}  // namespace

std::vector<double> default_bode_freqs(double f_min, double f_max, int points) {
    if (!(f_min > 0.0) || !(f_max > f_min)) throw ConfigError("invalid frequency range");
    if (points < 2) throw ConfigError("need at least 2 frequency points");
    std::vector<double> freqs(static_cast<std::size_t>(points));
    const double l0 = std::log10(f_min), l1 = std::log10(f_max);
    for (int i = 0; i < points; ++i)
        freqs[static_cast<std::size_t>(i)] =
            std::pow(10.0, l0 + (l1 - l0) * i / static_cast<double>(points - 1));
    return freqs;
}

namespace {

std::array<BodePoint, 2> frequency_response_impl(const SimConfig& base, double freq,
                                                 const BodeOptions& opts,
                                                 const OperatingPoint& op,
                                                 const std::vector<RelaxedState>& relaxed) {
    if (freq <= 0.0) throw ConfigError("frequency must be > 0");
    if (opts.n_cycles < 5) throw ConfigError("n_cycles must be >= 5");

    const double amplitude = opts.amplitude > 0.0 ? opts.amplitude : 0.05 * op.a_ss;
    if (!(amplitude > 0.0)) throw ConfigError("forcing amplitude must be > 0");
    const double tau_a = ai_time_constant(base.env);
    const double wta = kTwoPi * freq * tau_a;
    // Compensate the first-order a-response so the induced oscillation has
    // roughly the requested amplitude at every frequency.
    const double drive = amplitude * std::sqrt(1.0 + wta * wta) / tau_a;

    const double settle =
        opts.settle_time > 0.0 ? opts.settle_time : std::max(1.5 * op.tau_slow, 3.0 / freq);
    const int n_cycles = static_cast<int>(
        std::ceil(std::max(static_cast<double>(opts.n_cycles), opts.min_duration * freq)));
    const double dt = base.dt;
    const long settle_steps = static_cast<long>(std::ceil(settle / dt));
    const long measure_steps =
        static_cast<long>(std::llround(static_cast<double>(n_cycles) / freq / dt));

    const int reps = std::max(opts.n_replicates, 1);
    std::vector<std::array<std::complex<double>, 2>> ratios(static_cast<std::size_t>(reps));
    std::vector<std::array<double, 2>> out_amps(static_cast<std::size_t>(reps));
    std::vector<std::array<double, 2>> out_snr(static_cast<std::size_t>(reps));
    std::vector<double> in_amps(static_cast<std::size_t>(reps));
    std::vector<double> in_snr(static_cast<std::size_t>(reps));

    for (int r = 0; r < reps; ++r) {
        const auto& rs = relaxed[static_cast<std::size_t>(r)];
        SimConfig cfg = op.cfg;
        cfg.seed = base.seed ^ static_cast<std::uint64_t>(r);
        SimOptions sim_opts;
        sim_opts.step_offset = rs.steps;
        const double t_force = rs.state.t;
        sim_opts.a_forcing = [drive, freq, t_force](double t) {
            return drive * std::sin(kTwoPi * freq * (t - t_force));
        };
        Simulation sim(cfg, sim_opts);
        sim.set_state(rs.state);
        sim.run(settle_steps);

        std::vector<double> a_series;
        std::array<std::vector<double>, 2> m_series;
        a_series.reserve(static_cast<std::size_t>(measure_steps));
        m_series[0].reserve(static_cast<std::size_t>(measure_steps));
        m_series[1].reserve(static_cast<std::size_t>(measure_steps));
        for (long i = 0; i < measure_steps; ++i) {
            sim.step_once();
            const auto& st = sim.state();
            a_series.push_back(st.a);
            for (int s = 0; s < 2; ++s) {
                double sum = 0.0;
                for (double v : st.m[s]) sum += v;
                m_series[s].push_back(sum / static_cast<double>(st.m[s].size()));
            }
        }
        const LockInResult in = lock_in(a_series, dt, freq, n_cycles);
        in_amps[static_cast<std::size_t>(r)] = in.amplitude;
        in_snr[static_cast<std::size_t>(r)] =
            in.noise_amp > 0.0 ? in.amplitude / in.noise_amp : 1e12;
        const std::complex<double> in_phasor =
            std::polar(std::max(in.amplitude, 1e-300), in.phase);
        for (int s = 0; s < 2; ++s) {
            const LockInResult out = lock_in(m_series[s], dt, freq, n_cycles);
            ratios[static_cast<std::size_t>(r)][s] =
                std::polar(out.amplitude, out.phase) / in_phasor;
            out_amps[static_cast<std::size_t>(r)][s] = out.amplitude;
            out_snr[static_cast<std::size_t>(r)][s] =
                out.noise_amp > 0.0 ? out.amplitude / out.noise_amp : 1e12;
        }
    }

    std::array<BodePoint, 2> points;
    for (int s = 0; s < 2; ++s) {
        std::complex<double> h{0.0, 0.0};
        double in_amp = 0.0, out_amp = 0.0, snr_in = 0.0, snr_out = 0.0;
        for (int r = 0; r < reps; ++r) {
            h += ratios[static_cast<std::size_t>(r)][s];
            in_amp += in_amps[static_cast<std::size_t>(r)];
            out_amp += out_amps[static_cast<std::size_t>(r)][s];
            snr_in += in_snr[static_cast<std::size_t>(r)];
            snr_out += out_snr[static_cast<std::size_t>(r)][s];
        }
        h /= static_cast<double>(reps);
        BodePoint& p = points[static_cast<std::size_t>(s)];
        p.freq_hz = freq;
        p.species = s;
        p.gain = std::abs(h);
        p.gain_db = 20.0 * std::log10(std::max(p.gain, 1e-300));
        p.phase_rad = std::arg(h);
        p.input_amp = in_amp / reps;
        p.output_amp = out_amp / reps;
        const double snr = std::min(snr_in, snr_out) / reps * std::sqrt(static_cast<double>(reps));
        p.reliable = snr >= 2.0;
    }
    return points;
}

}  // namespace

std::array<BodePoint, 2> frequency_response(const SimConfig& cfg, double freq_hz,
                                            const BodeOptions& opts) {
    cfg.validate();
    const OperatingPoint op = operating_point(cfg);
    const double relax_time =
        opts.relax_time > 0.0 ? opts.relax_time : 1.5 * op.tau_slow;
    const int reps = std::max(opts.n_replicates, 1);
    std::vector<RelaxedState> relaxed(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), opts.n_threads, [&](std::size_t r) {
        relaxed[r] = relax(op, cfg.seed ^ static_cast<std::uint64_t>(r), relax_time);
    });
    return frequency_response_impl(cfg, freq_hz, opts, op, relaxed);
}

std::vector<BodePoint> bode_sweep(const SimConfig& cfg, const std::vector<double>& freqs,
                                  const BodeOptions& opts) {
    cfg.validate();
    if (freqs.empty()) throw ConfigError("frequency sweep list is empty");
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i] <= 0.0) throw ConfigError("frequencies must be > 0");
        if (i > 0 && freqs[i] <= freqs[i - 1])
            throw ConfigError("frequencies must be strictly increasing");
    }
    const OperatingPoint op = operating_point(cfg);
    const double relax_time =
        opts.relax_time > 0.0 ? opts.relax_time : 1.5 * op.tau_slow;
    const int reps = std::max(opts.n_replicates, 1);
    std::vector<RelaxedState> relaxed(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), opts.n_threads, [&](std::size_t r) {
        relaxed[r] = relax(op, cfg.seed ^ static_cast<std::uint64_t>(r), relax_time);
    });

    std::vector<std::array<BodePoint, 2>> per_freq(freqs.size());
    parallel_for(freqs.size(), opts.n_threads, [&](std::size_t i) {
        per_freq[i] = frequency_response_impl(cfg, freqs[i], opts, op, relaxed);
    });
    std::vector<BodePoint> out;
    out.reserve(freqs.size() * 2);
    for (const auto& pair : per_freq) {
        out.push_back(pair[0]);
        out.push_back(pair[1]);
    }
    return out;
}

}  // namespace qscomm
