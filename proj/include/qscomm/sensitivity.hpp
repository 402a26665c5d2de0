#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qscomm/model.hpp"

namespace qscomm {

struct ElasticityReport {
    std::string param;
    double epsilon = 0.2;
    double I0 = 0.0, I_plus = 0.0, I_minus = 0.0;
    double S = 0.0;  // (I_plus - I_minus) / (2 * epsilon * I0)
};

struct ElasticityOptions {
    int n_reps = 3;
    int k = 4;
    double burn_in_frac = 0.1;
    int n_threads = 1;
};

// Valid parameter names: alpha_luxs, tau_a, tau_delta (all scaled by 1 +/- eps)
// and gamma (provably unused by the model; S is exactly zero).
extern const std::vector<std::string> kElasticityParams;

// Paired +/- epsilon re-simulation with common random numbers: all three
// conditions reuse the identical replicate seeds, so S is deterministic given
// (config, seed). The averaged information is the mean over both populations'
// MI(a; m_mean) across the replicate set.
ElasticityReport elasticity(const SimConfig& cfg, const std::string& param, double epsilon,
                            const ElasticityOptions& opts = {});

}  // namespace qscomm
