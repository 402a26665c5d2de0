#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qscomm/engine.hpp"
#include "qscomm/model.hpp"

namespace qscomm {

struct BodePoint {
    double freq_hz = 0.0;
    int species = 0;
    double gain = 0.0;      // output amplitude / measured input amplitude
    double gain_db = 0.0;   // 20*log10(gain)
    double phase_rad = 0.0; // wrapped to (-pi, pi]
    bool reliable = true;   // false when the lock-in SNR drops below 2
    double input_amp = 0.0;
    double output_amp = 0.0;
};

struct LockInResult {
    double amplitude = 0.0;
    double phase = 0.0;  // of A*sin(2*pi*f*(t - t0) + phase)
    double noise_amp = 0.0;
};

// Single-frequency Fourier projection of a uniformly sampled series over an
// integer number of cycles. The noise floor comes from adjacent Fourier bins
// of the same window (needs n_cycles >= 5).
LockInResult lock_in(std::span<const double> values, double dt, double freq, int n_cycles);

struct BodeOptions {
    double amplitude = 0.0;     // target induced a-oscillation; <= 0 -> 5% of steady-state a
    int n_cycles = 5;           // minimum measured cycles
    double min_duration = 600.0;  // seconds; rounded up to whole cycles
    double relax_time = 0.0;    // <= 0 -> auto from time constants
    double settle_time = 0.0;   // forcing transient burn-in; <= 0 -> auto
    int n_replicates = 2;
    int n_threads = 1;
};

// Measures the empirical transfer function from the shared autoinducer to the
// population-mean monitor response at one frequency. Densities are held at
// their t_max values and the system is pre-relaxed before forcing; the gain
// uses the measured a-oscillation as the input amplitude.
std::array<BodePoint, 2> frequency_response(const SimConfig& cfg, double freq_hz,
                                            const BodeOptions& opts = {});

std::vector<BodePoint> bode_sweep(const SimConfig& cfg, const std::vector<double>& freqs,
                                  const BodeOptions& opts = {});

std::vector<double> default_bode_freqs(double f_min = 1e-3, double f_max = 10.0, int points = 20);

}  // namespace qscomm
