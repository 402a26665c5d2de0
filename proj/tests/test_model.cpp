#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qscomm/config_io.hpp"
#include "qscomm/model.hpp"

using namespace qscomm;

TEST_CASE("exponential ramp values") {
    auto ramp = DensitySchedule::exp_ramp(1e-4, 1.0, 1800.0);
    CHECK(density_at(ramp, 0.0) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(density_at(ramp, 1800.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(density_at(ramp, 900.0) == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(density_at(ramp, 2500.0) == doctest::Approx(1.0).epsilon(1e-12));  // clamped
}

TEST_CASE("exponential ramp is log-affine") {
    auto ramp = DensitySchedule::exp_ramp(3e-5, 0.7, 1800.0);
    const double l0 = std::log(density_at(ramp, 200.0));
    const double l1 = std::log(density_at(ramp, 700.0));
    const double l2 = std::log(density_at(ramp, 1200.0));
    CHECK(l1 - l0 == doctest::Approx(l2 - l1).epsilon(1e-10));
}

TEST_CASE("step and logistic schedules") {
    auto st = DensitySchedule::step(0.1, 0.8, 100.0);
    CHECK(density_at(st, 99.99) == 0.1);
    CHECK(density_at(st, 100.0) == 0.8);

    auto lg = DensitySchedule::logistic(1e-4, 1.0, 900.0, 0.01);
    CHECK(density_at(lg, 900.0) == doctest::Approx(0.5 * (1.0 + 1e-4)).epsilon(1e-9));
    // continuity on a fine grid
    double prev = density_at(lg, 0.0);
    for (int i = 1; i <= 2000; ++i) {
        const double cur = density_at(lg, i * 0.9);
        CHECK(std::fabs(cur - prev) < 1e-2);
        prev = cur;
    }
}

TEST_CASE("piecewise schedule interpolates in log-density") {
    auto pw = DensitySchedule::piecewise({{0.0, 1e-4}, {10.0, 1e-2}, {20.0, 1.0}});
    CHECK(density_at(pw, 5.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(density_at(pw, 15.0) == doctest::Approx(1e-1).epsilon(1e-12));
    CHECK(density_at(pw, 0.0) == doctest::Approx(1e-4));
    CHECK(density_at(pw, 25.0) == doctest::Approx(1.0));  // clamped beyond the range

    CHECK_THROWS_AS(DensitySchedule::piecewise({{0.0, 1.0}, {0.0, 2.0}}), ConfigError);
    CHECK_THROWS_AS(DensitySchedule::piecewise({{0.0, 1.0}, {1.0, -2.0}}), ConfigError);
    CHECK_THROWS_AS(DensitySchedule::piecewise({{0.0, 1.0}}), ConfigError);
}

TEST_CASE("schedule factories validate") {
    CHECK_THROWS_AS(DensitySchedule::exp_ramp(0.0, 1.0, 10.0), ConfigError);
    CHECK_THROWS_AS(DensitySchedule::exp_ramp(1e-4, -1.0, 10.0), ConfigError);
    CHECK_THROWS_AS(DensitySchedule::exp_ramp(1e-4, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(DensitySchedule::logistic(1e-4, 1.0, 0.0, 0.0), ConfigError);
}

TEST_CASE("hill activation") {
    SpeciesParams p;
    p.k_resp = 2.0;
    p.K_A = 0.5;

    SUBCASE("half saturation for any exponent") {
        for (double n : {1.0, 2.0, 3.7}) {
            p.n = n;
            CHECK(hill_activation(p.K_A, p) == doctest::Approx(p.k_resp / 2).epsilon(1e-12));
        }
    }
    SUBCASE("zero input") { CHECK(hill_activation(0.0, p) == 0.0); }
    SUBCASE("worked value") {
        p.k_resp = 1.0;
        p.n = 2.0;
        CHECK(hill_activation(1.0, p) == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("strictly monotone") {
        p.n = 2.0;
        double prev = -1.0;
        for (double a = 0.0; a < 5.0; a += 0.05) {
            const double v = hill_activation(a, p);
            CHECK(v > prev);
            prev = v;
        }
    }
    SUBCASE("saturation") {
        p.k_resp = 1.0;
        for (double n : {2.0, 3.0}) {
            p.n = n;
            CHECK(hill_activation(100.0 * p.K_A, p) >= 0.9999);
        }
        CHECK(hill_activation(100.0 * p.K_A, p) <= p.k_resp);
    }
}

TEST_CASE("monitor time constant") {
    SpeciesParams p;
    p.delta = 1.0 / 1800.0;
    p.mu_g_coeff = 0.0;
    CHECK(monitor_time_constant(p, 123.0) == doctest::Approx(1800.0).epsilon(1e-12));

    p.delta = 0.5;
    p.mu_g_coeff = 0.5;
    CHECK(monitor_time_constant(p, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    p.delta = 1.0 / 1800.0;
    p.mu_g_coeff = 1.0;
    CHECK(monitor_time_constant(p, 1.0) == doctest::Approx(0.999444753).epsilon(1e-6));

    double prev = 1e18;
    for (double rho = 0.0; rho < 3.0; rho += 0.1) {
        const double v = monitor_time_constant(p, rho);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("ai time constant") {
    EnvironmentParams env;
    env.k_out = 0.1;
    env.mu_gut = 0.0;
    CHECK(ai_time_constant(env) == doctest::Approx(10.0).epsilon(1e-12));
    env.k_out = 0.05;
    env.mu_gut = 0.05;
    CHECK(ai_time_constant(env) == doctest::Approx(10.0).epsilon(1e-12));
    env.k_out = 1.0;
    env.mu_gut = 1.0;
    CHECK(ai_time_constant(env) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("parameter validation rejects bad inputs") {
    SpeciesParams p;
    p.delta = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = SpeciesParams{};
    p.K_A = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = SpeciesParams{};
    p.n = 0.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = SpeciesParams{};
    p.alpha_luxs = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = SpeciesParams{};
    p.sigma_m = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = SpeciesParams{};
    p.n_cells = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = SpeciesParams{};
    p.mu_g_coeff = -1e-9;
    CHECK_THROWS_AS(p.validate(), ConfigError);

    EnvironmentParams env;
    env.k_out = 0.0;
    env.mu_gut = 0.0;
    CHECK_THROWS_AS(env.validate(), ConfigError);
    env = EnvironmentParams{};
    env.volume = 0.0;
    CHECK_THROWS_AS(env.validate(), ConfigError);
    env = EnvironmentParams{};
    env.sigma_a = -0.1;
    CHECK_THROWS_AS(env.validate(), ConfigError);

    SimConfig cfg = default_config();
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    cfg.record_stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    cfg.a0 = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = default_config();
    cfg.memory_cap_bytes = 1024;  // far below the recording footprint
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config json round-trip and strictness") {
    const SimConfig cfg = default_config();
    const auto j = config_to_json(cfg);
    const SimConfig back = config_from_json(j);
    CHECK(config_hash(back) == config_hash(cfg));

    auto bad = j;
    bad["dtt"] = 0.01;
    CHECK_THROWS_AS(config_from_json(bad), ConfigError);

    auto bad2 = j;
    bad2["species"][0]["K_a"] = 0.5;  // typo must be a hard error
    CHECK_THROWS_AS(config_from_json(bad2), ConfigError);

    auto bad3 = j;
    bad3["dt"] = 0.0;
    CHECK_THROWS_AS(config_from_json(bad3), ConfigError);
}

TEST_CASE("scenario splits") {
    const SimConfig base = default_config();
    const SimConfig fd = make_scenario_config(base, scenario_by_name("firmicutes_dominant"));
    CHECK(density_at(fd.species[0].density_schedule, base.t_max) == doctest::Approx(0.9));
    CHECK(density_at(fd.species[1].density_schedule, base.t_max) == doctest::Approx(0.1));
    CHECK(fd.species[0].n_cells + fd.species[1].n_cells ==
          base.species[0].n_cells + base.species[1].n_cells);

    const SimConfig bd = make_scenario_config(base, scenario_by_name("bacteroidetes_dominant"));
    CHECK(density_at(bd.species[0].density_schedule, base.t_max) == doctest::Approx(0.4));
    CHECK(density_at(bd.species[1].density_schedule, base.t_max) == doctest::Approx(0.6));

    CHECK_THROWS_AS(scenario_by_name("unknown"), ConfigError);
}
