#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qscomm/model.hpp"

namespace qscomm {

// psi(x) for x > 0; accurate to ~1e-12 for the integer arguments used here.
double digamma(double x);

struct MIEstimate {
    double bits = 0.0;
    double ci_low = 0.0, ci_high = 0.0;
    int k = 0;
    std::size_t n_samples = 0;
    int block_len = 0;
};

// KSG estimator (algorithm 1: max-norm, digamma form), in bits. Distance ties
// are broken by an infinitesimal jitter derived from the sample index, so the
// result is deterministic and exactly symmetric in (x, y).
double ksg_mi(std::span<const double> x, std::span<const double> y, int k = 4);

// Plug-in estimate from a 2-D equal-width histogram, in bits; never negative.
// Serves as an independent cross-check of ksg_mi.
double binned_mi(std::span<const double> x, std::span<const double> y, int bins);

// Circular block resampling preserving the (x, y) pairing within blocks:
// each resample concatenates half the blocks of a randomly offset circular
// partition, drawn without replacement (kNN estimators misread duplicated
// points as dependence, so with-replacement draws are ruled out). Returns the
// percentile interval at level alpha. Deterministic given seed and
// independent of the worker count.
std::pair<double, double> block_bootstrap_ci(
    std::span<const double> x, std::span<const double> y,
    const std::function<double(std::span<const double>, std::span<const double>)>& estimator,
    int block_len, int n_boot, double alpha, std::uint64_t seed, int n_threads = 1);

// ksg_mi plus a bootstrap interval. block_len <= 0 picks ceil(n^(1/3)).
MIEstimate ksg_mi_with_ci(std::span<const double> x, std::span<const double> y, int k = 4,
                          int block_len = 0, int n_boot = 200, double alpha = 0.05,
                          std::uint64_t seed = 0, int n_threads = 1);

struct TransferEntropy {
    double bits_raw = 0.0;  // can be slightly negative (estimator noise)
    double bits = 0.0;      // max(bits_raw, 0)
};

// I(dst_t ; src_{t-lag} | dst_{t-lag}) in bits via the kNN conditional-MI
// estimator (Frenzel-Pompe construction).
TransferEntropy transfer_entropy(std::span<const double> src, std::span<const double> dst,
                                 int lag = 1, int k = 4);

// Same embedding, but the (dst_t, src_{t-lag}, dst_{t-lag}) triples are pooled
// from several series (replicates) without crossing series boundaries.
TransferEntropy transfer_entropy_pooled(const std::vector<std::span<const double>>& src,
                                        const std::vector<std::span<const double>>& dst,
                                        int lag = 1, int k = 4);

struct NoiseSplit {
    double intrinsic_frac = 0.0;
    double extrinsic_frac = 0.0;
    double intrinsic_var = 0.0;
    double extrinsic_var = 0.0;
};

struct NoiseWindow {
    double start_frac = 0.1;  // fraction of the recorded samples to skip
    double end_frac = 1.0;
    int n_bins = 12;               // autoinducer occupancy guard
    std::size_t min_bin_count = 10;
};

// Law-of-total-variance split of pooled single-cell variance over the analysis
// window. Slices are (replicate, time) pairs: the across-cell variance within a
// slice is intrinsic, the variance of the cell means across slices (shared
// drive, including its trend) is extrinsic. Fractions sum to one by
// construction. The autoinducer values gate the window: equal-width bins are
// merged up to a minimum occupancy and fewer than three usable bins is an
// error, except for an exactly constant autoinducer (a valid degenerate limit,
// e.g. sigma_a = 0 at a stationary operating point) where binning is skipped.
NoiseSplit noise_decomposition(const std::vector<Trajectory>& replicates, int species,
                               const NoiseWindow& window = {});

// Per-time arithmetic mean across one species' cells.
std::vector<double> mean_monitor(const Trajectory& traj, int species);

}  // namespace qscomm
