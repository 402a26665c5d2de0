#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qscomm/info.hpp"
#include "qscomm/model.hpp"

namespace qscomm {

struct AnalysisOptions {
    int n_reps = 5;
    int k = 4;
    double burn_in_frac = 0.1;          // fraction of t_max discarded before estimation
    int te_lag = 1;                     // in recorded samples
    std::size_t max_pooled_samples = 20000;  // cap for pooled single-cell MI
    int n_boot = 200;
    double alpha = 0.05;
    int block_len = 0;  // 0 -> ceil(n^(1/3))
    std::uint64_t boot_seed = 0;
    int n_threads = 1;
    NoiseWindow noise_window{};
};

// Pools per-replicate series (burn-in discarded) and runs the requested
// analyses over a common replicate set:
//   mi    - MI(a; m_mean) per population with bootstrap CI, plus pooled
//           single-cell MI per population
//   cross - MI(m_mean_i; rho_j) for both cross pairings
//   te    - transfer entropy between the population means, both directions
//   noise - intrinsic/extrinsic split on this scenario plus stationary
//           sigma_a = 0 and sigma_m = 0 controls at the operating point
nlohmann::json analyze(const SimConfig& cfg, const std::set<std::string>& analyses,
                       const AnalysisOptions& opts = {});

// Stationary operating-point variant used by the noise controls: densities
// held at their t_max values, initial condition at the deterministic fixed
// point, horizon long enough for the monitor-noise statistics to equilibrate.
SimConfig stationary_control_config(const SimConfig& base);

}  // namespace qscomm
