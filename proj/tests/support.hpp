#pragma once

// Shared test helpers: deterministic synthetic data generators and an
// independent Runge-Kutta reference for the zero-noise system.

#include <cmath>
#include <cstdint>
#include <vector>

#include "qscomm/model.hpp"
#include "qscomm/rng.hpp"

namespace qscomm::test {

inline double unit_draw(std::uint64_t seed, std::uint64_t i) {
    return unit_from_bits(mix64(mix64(seed) ^ mix64(i)));
}

inline double normal_draw(std::uint64_t seed, std::uint64_t i) {
    return gaussian_increment(mix64(seed ^ 0x7F4A7C15ull), i);
}

// Correlated standard-normal pairs with the exact closed-form MI
// -0.5*log2(1 - rho^2).
inline void gaussian_pairs(std::size_t n, double rho, std::uint64_t seed,
                           std::vector<double>& x, std::vector<double>& y) {
    x.resize(n);
    y.resize(n);
    const double c = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = normal_draw(seed, 2 * i);
        const double z2 = normal_draw(seed, 2 * i + 1);
        x[i] = z1;
        y[i] = rho * z1 + c * z2;
    }
}

inline std::vector<double> ar1_series(std::size_t n, double phi, std::uint64_t seed) {
    std::vector<double> v(n);
    double state = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        state = phi * state + normal_draw(seed, i);
        v[i] = state;
    }
    return v;
}

// Classical RK4 on the zero-noise reduction of the model: with sigma = 0 every
// cell of a species follows the same deterministic path, so the system is
// three coupled ODEs (a, m of species 0, m of species 1). Drift terms reuse
// the pure model functions; the integrator itself is independent of the
// Euler-Maruyama engine.
struct OdeReference {
    std::vector<double> times, a;
    std::array<std::vector<double>, 2> m;
};

inline OdeReference rk4_reference(const SimConfig& cfg, int substeps) {
    const double tau_a = ai_time_constant(cfg.env);
    auto deriv = [&](double t, const std::array<double, 3>& y, std::array<double, 3>& dy) {
        const double rho0 = density_at(cfg.species[0].density_schedule, t);
        const double rho1 = density_at(cfg.species[1].density_schedule, t);
        dy[0] = -y[0] / tau_a + rho0 * cfg.species[0].alpha_luxs +
                rho1 * cfg.species[1].alpha_luxs;
        for (int s = 0; s < 2; ++s) {
            const auto& sp = cfg.species[s];
            dy[static_cast<std::size_t>(s) + 1] =
                -y[static_cast<std::size_t>(s) + 1] / monitor_time_constant(sp, rho0 + rho1) +
                production_scale(sp, rho1, rho0) * hill_activation(y[0], sp);
        }
    };

    OdeReference ref;
    std::array<double, 3> y{cfg.a0, cfg.m0, cfg.m0};
    const long steps = cfg.n_steps();
    const double h = cfg.dt / substeps;
    auto record = [&](double t) {
        ref.times.push_back(t);
        ref.a.push_back(y[0]);
        ref.m[0].push_back(y[1]);
        ref.m[1].push_back(y[2]);
    };
    record(0.0);
    std::array<double, 3> k1{}, k2{}, k3{}, k4{}, tmp{};
    for (long i = 0; i < steps; ++i) {
        for (int sub = 0; sub < substeps; ++sub) {
            const double t = static_cast<double>(i) * cfg.dt + sub * h;
            deriv(t, y, k1);
            for (int d = 0; d < 3; ++d) tmp[d] = y[d] + 0.5 * h * k1[d];
            deriv(t + 0.5 * h, tmp, k2);
            for (int d = 0; d < 3; ++d) tmp[d] = y[d] + 0.5 * h * k2[d];
            deriv(t + 0.5 * h, tmp, k3);
            for (int d = 0; d < 3; ++d) tmp[d] = y[d] + h * k3[d];
            deriv(t + h, tmp, k4);
            for (int d = 0; d < 3; ++d)
                y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        if ((i + 1) % cfg.record_stride == 0)
            record(static_cast<double>(i + 1) * cfg.dt);
    }
    return ref;
}

}  // namespace qscomm::test
