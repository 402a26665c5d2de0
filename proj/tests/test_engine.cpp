#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qscomm/config_io.hpp"
#include "qscomm/engine.hpp"
#include "support.hpp"

using namespace qscomm;

namespace {

// Two identical quiet species on constant densities; handy starting point for
// the analytic step-level checks.
SimConfig quiet_config() {
    SimConfig cfg = default_config();
    for (auto& sp : cfg.species) {
        sp.alpha_luxs = 0.0;
        sp.k_resp = 0.0;
        sp.sigma_m = 0.0;
        sp.n_cells = 3;
        sp.density_schedule = DensitySchedule::constant(0.5);
    }
    cfg.env.sigma_a = 0.0;
    cfg.dt = 0.01;
    cfg.record_stride = 100;
    return cfg;
}

}  // namespace

TEST_CASE("noise streams are counter-deterministic and distinct") {
    const auto k1 = noise_key(42, NoiseKind::Mp, 0, 7);
    CHECK(gaussian_increment(k1, 1000) == gaussian_increment(k1, 1000));
    CHECK(gaussian_increment(k1, 1000) != gaussian_increment(k1, 1001));
    CHECK(noise_key(42, NoiseKind::Mp, 0, 7) == k1);
    CHECK(noise_key(42, NoiseKind::Mp, 0, 8) != k1);
    CHECK(noise_key(42, NoiseKind::Mp, 1, 7) != k1);
    CHECK(noise_key(42, NoiseKind::Ai, 0, 7) != k1);
    CHECK(noise_key(43, NoiseKind::Mp, 0, 7) != k1);

    // streams are (at least) uncorrelated
    double acc = 0.0;
    const auto k2 = noise_key(42, NoiseKind::Mp, 0, 8);
    for (std::uint64_t i = 0; i < 20000; ++i)
        acc += gaussian_increment(k1, i) * gaussian_increment(k2, i);
    CHECK(std::fabs(acc / 20000.0) < 0.03);
}

TEST_CASE("pure decay matches the exponential") {
    SimConfig cfg = quiet_config();
    cfg.a0 = 1.0;
    cfg.m0 = 0.0;
    cfg.env.k_out = 0.1;  // tau_a = 10
    cfg.t_max = 10.0;
    Simulation sim(cfg);
    sim.run(1000);
    CHECK(std::fabs(sim.state().a - std::exp(-1.0)) <= 0.001);
}

TEST_CASE("zero drift fixed point stays exactly zero") {
    SimConfig cfg = quiet_config();
    cfg.a0 = 0.0;
    cfg.m0 = 0.0;
    cfg.t_max = 50.0;
    const Trajectory tr = simulate(cfg);
    for (double v : tr.a) CHECK(v == 0.0);
    for (int s = 0; s < 2; ++s)
        for (const auto& cell : tr.m[s])
            for (double v : cell) CHECK(v == 0.0);
}

TEST_CASE("monitor relaxes to tau_m * k_resp / 2 under half-saturating signal") {
    SimConfig cfg = quiet_config();
    for (auto& sp : cfg.species) {
        sp.k_resp = 1.0;
        sp.K_A = 0.5;
        sp.delta = 0.1;  // tau_m = 10
        sp.mu_scale = 1.0;
    }
    cfg.env.k_out = 1e-12;  // hold a essentially constant
    cfg.a0 = 0.5;
    cfg.m0 = 0.0;
    cfg.t_max = 200.0;
    const Trajectory tr = simulate(cfg);
    const double expected = 10.0 * 0.5;  // tau_m * k_resp/2
    CHECK(tr.m_mean[0].back() == doctest::Approx(expected).epsilon(1e-3));
    CHECK(tr.m_mean[1].back() == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("zero-noise run tracks a fourth-order reference") {
    SimConfig cfg = default_config();
    for (auto& sp : cfg.species) {
        sp.sigma_m = 0.0;
        sp.n_cells = 2;
    }
    cfg.env.sigma_a = 0.0;
    cfg.m0 = 0.01;
    const Trajectory tr = simulate(cfg);
    const auto ref = test::rk4_reference(cfg, 5);
    REQUIRE(ref.times.size() == tr.times.size());
    double max_rel = 0.0;
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
        const double ra = std::fabs(tr.a[i] - ref.a[i]) / std::max(std::fabs(ref.a[i]), 1e-12);
        max_rel = std::max(max_rel, ra);
        for (int s = 0; s < 2; ++s) {
            const double rm = std::fabs(tr.m_mean[s][i] - ref.m[s][i]) /
                              std::max(std::fabs(ref.m[s][i]), 1e-12);
            max_rel = std::max(max_rel, rm);
        }
    }
    CHECK(max_rel <= 10.0 * cfg.dt);
    CHECK(max_rel < 0.02);  // expected to be far inside the bound
}

TEST_CASE("halving dt moves the zero-noise endpoint less than the Euler bound") {
    SimConfig cfg = default_config();
    for (auto& sp : cfg.species) {
        sp.sigma_m = 0.0;
        sp.n_cells = 1;
    }
    cfg.env.sigma_a = 0.0;
    cfg.t_max = 300.0;
    const Trajectory coarse = simulate(cfg);
    cfg.dt = 0.005;
    const Trajectory fine = simulate(cfg);
    const double c = coarse.m_mean[0].back();
    const double f = fine.m_mean[0].back();
    CHECK(std::fabs(c - f) / std::max(std::fabs(f), 1e-12) < 5.0 * 0.01);
}

TEST_CASE("autoinducer increments have the prescribed variance") {
    SimConfig cfg = quiet_config();
    cfg.env.sigma_a = 0.1;
    cfg.env.volume = 200.0;
    cfg.env.k_out = 1e-12;  // drift disabled
    cfg.a0 = 10.0;
    cfg.t_max = 1000.0;
    Simulation sim(cfg);
    const long n = 100000;
    double prev = sim.state().a;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n; ++i) {
        sim.step_once();
        const double d = sim.state().a - prev;
        prev = sim.state().a;
        sum += d;
        sum2 += d * d;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double expected = 2.0 * (1.0 / cfg.env.volume) * 0.1 * 0.1 * cfg.dt;
    CHECK(var == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("recorded values are non-negative and shapes are consistent") {
    SimConfig cfg = default_config();
    cfg.t_max = 60.0;
    const Trajectory tr = simulate(cfg);
    const std::size_t expect =
        static_cast<std::size_t>(cfg.t_max / (cfg.dt * cfg.record_stride)) + 1;
    CHECK(tr.n_samples() == expect);
    CHECK(tr.a.size() == expect);
    for (int s = 0; s < 2; ++s) {
        CHECK(tr.m_mean[s].size() == expect);
        CHECK(tr.m[s].size() == static_cast<std::size_t>(cfg.species[s].n_cells));
        for (const auto& cell : tr.m[s]) {
            CHECK(cell.size() == expect);
            for (double v : cell) CHECK(v >= 0.0);
        }
    }
    for (double v : tr.a) CHECK(v >= 0.0);

    // m_mean matches the recomputed cell average
    for (int s = 0; s < 2; ++s)
        for (std::size_t t = 0; t < expect; ++t) {
            double acc = 0.0;
            for (const auto& cell : tr.m[s]) acc += cell[t];
            acc /= static_cast<double>(tr.m[s].size());
            CHECK(tr.m_mean[s][t] == doctest::Approx(acc).epsilon(1e-12));
        }
}

TEST_CASE("t_max = 0 records exactly the initial state") {
    SimConfig cfg = quiet_config();
    cfg.t_max = 0.0;
    cfg.a0 = 0.25;
    cfg.m0 = 0.125;
    const Trajectory tr = simulate(cfg);
    REQUIRE(tr.n_samples() == 1);
    CHECK(tr.times[0] == 0.0);
    CHECK(tr.a[0] == 0.25);
    CHECK(tr.m_mean[0][0] == 0.125);
}

TEST_CASE("identical seeds reproduce bit-identical trajectories") {
    SimConfig cfg = default_config();
    cfg.t_max = 30.0;
    const Trajectory t1 = simulate(cfg);
    const Trajectory t2 = simulate(cfg);
    CHECK(t1.a == t2.a);
    CHECK(t1.m_mean[0] == t2.m_mean[0]);
    CHECK(t1.m[1] == t2.m[1]);

    cfg.seed = 1;
    const Trajectory t3 = simulate(cfg);
    cfg.seed = 2;
    const Trajectory t4 = simulate(cfg);
    CHECK(t3.a != t4.a);
}

TEST_CASE("replicates are worker-count independent and seed-derived") {
    SimConfig cfg = default_config();
    cfg.t_max = 20.0;

    const auto serial = run_replicates(cfg, 5, 1);
    const auto threaded = run_replicates(cfg, 5, 4);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t r = 0; r < serial.size(); ++r) {
        CHECK(serial[r].a == threaded[r].a);
        CHECK(serial[r].m_mean[0] == threaded[r].m_mean[0]);
        CHECK(serial[r].m_mean[1] == threaded[r].m_mean[1]);
    }

    // replicate 0 uses the base seed
    const Trajectory single = simulate(cfg);
    CHECK(serial[0].a == single.a);

    // replicate r reproduces a run seeded with seed ^ r
    SimConfig cfg3 = cfg;
    cfg3.seed = cfg.seed ^ 3ull;
    CHECK(serial[3].a == simulate(cfg3).a);
}

TEST_CASE("five baseline replicates put the Firmicutes mean above Bacteroidetes") {
    SimConfig cfg = default_config();
    const auto reps = run_replicates(cfg, 5, 4);
    double mf = 0.0, mb = 0.0;
    for (const auto& tr : reps) {
        mf += tr.m_mean[0].back();
        mb += tr.m_mean[1].back();
    }
    CHECK(mf / 5.0 > mb / 5.0);
}

TEST_CASE("non-finite state aborts with a diagnostic") {
    SimConfig cfg = quiet_config();
    cfg.species[0].alpha_luxs = 1e306;
    cfg.dt = 1000.0;
    cfg.t_max = 10000.0;
    cfg.record_stride = 1;
    CHECK_THROWS_AS(simulate(cfg), NumericalError);
}

TEST_CASE("memory cap rejects oversized recordings before running") {
    SimConfig cfg = default_config();
    cfg.record_stride = 1;
    cfg.memory_cap_bytes = 1 << 20;
    CHECK_THROWS_AS(simulate(cfg), ConfigError);
}
