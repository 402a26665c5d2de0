#include "qscomm/sensitivity.hpp"

#include <cmath>

#include "qscomm/engine.hpp"
#include "qscomm/errors.hpp"
#include "qscomm/info.hpp"

namespace qscomm {

const std::vector<std::string> kElasticityParams = {"alpha_luxs", "tau_a", "tau_delta", "gamma"};

namespace {

SimConfig perturbed(const SimConfig& base, const std::string& param, double factor) {
    SimConfig cfg = base;
    if (param == "alpha_luxs") {
        for (auto& sp : cfg.species) sp.alpha_luxs *= factor;
    } else if (param == "tau_a") {
        // tau_a = 1/(k_out + mu_gut); scale both loss rates jointly.
        cfg.env.k_out /= factor;
        cfg.env.mu_gut /= factor;
    } else if (param == "tau_delta") {
        for (auto& sp : cfg.species) sp.delta /= factor;
    } else if (param == "gamma") {
        cfg.gamma *= factor;
        if (cfg.gamma == 0.0) cfg.gamma = factor - 1.0;  // keep the conditions distinct
    } else {
        std::string names;
        for (const auto& n : kElasticityParams) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("unknown sensitivity parameter '" + param + "'; valid names: " + names);
    }
    return cfg;
}

double averaged_mi(const SimConfig& cfg, const ElasticityOptions& opts) {
    const auto reps = run_replicates(cfg, opts.n_reps, opts.n_threads);
    const std::size_t ns = reps.front().n_samples();
    const std::size_t i0 = static_cast<std::size_t>(
        opts.burn_in_frac * static_cast<double>(ns - 1));
    double acc = 0.0;
    for (const auto& tr : reps) {
        std::span<const double> a(tr.a.data() + i0, ns - i0);
        for (int s = 0; s < 2; ++s) {
            std::span<const double> m(tr.m_mean[s].data() + i0, ns - i0);
            acc += ksg_mi(a, m, opts.k);
        }
    }
    return acc / (2.0 * static_cast<double>(reps.size()));
}

}  // namespace

ElasticityReport elasticity(const SimConfig& cfg, const std::string& param, double epsilon,
                            const ElasticityOptions& opts) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) throw ConfigError("epsilon must be in (0, 0.5]");
    if (opts.n_reps < 1) throw ConfigError("n_reps must be >= 1");
    cfg.validate();
    (void)perturbed(cfg, param, 1.0 + epsilon);  // validates the name up front

    ElasticityReport rep;
    rep.param = param;
    rep.epsilon = epsilon;
    rep.I0 = averaged_mi(cfg, opts);
    if (rep.I0 < 0.1)
        throw NumericalError("baseline information " + std::to_string(rep.I0) +
                             " bits is below 0.1; the sensitivity index is ill-conditioned");
    rep.I_plus = averaged_mi(perturbed(cfg, param, 1.0 + epsilon), opts);
    rep.I_minus = averaged_mi(perturbed(cfg, param, 1.0 - epsilon), opts);
    rep.S = (rep.I_plus - rep.I_minus) / (2.0 * epsilon * rep.I0);
    return rep;
}

}  // namespace qscomm
