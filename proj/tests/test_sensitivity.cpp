#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qscomm/config_io.hpp"
#include "qscomm/sensitivity.hpp"

using namespace qscomm;

namespace {

// Reduced community: same dynamics, fewer cells, so the paired re-simulations
// stay fast in unit tests.
SimConfig small_config() {
    SimConfig cfg = default_config();
    for (auto& sp : cfg.species) sp.n_cells = 15;
    return cfg;
}

}  // namespace

TEST_CASE("unused parameter gamma has exactly zero elasticity") {
    ElasticityOptions opts;
    opts.n_reps = 2;
    opts.n_threads = 4;
    const ElasticityReport rep = elasticity(small_config(), "gamma", 0.2, opts);
    CHECK(rep.I_plus == rep.I_minus);  // bitwise identical pipelines
    CHECK(rep.S == 0.0);
    CHECK(rep.epsilon == 0.2);
}

TEST_CASE("elasticity is deterministic under common random numbers") {
    ElasticityOptions opts;
    opts.n_reps = 2;
    opts.n_threads = 2;
    const ElasticityReport a = elasticity(small_config(), "tau_a", 0.2, opts);
    const ElasticityReport b = elasticity(small_config(), "tau_a", 0.2, opts);
    CHECK(a.S == b.S);
    CHECK(a.I0 == b.I0);
}

TEST_CASE("definition-level identity: swapping the perturbed runs flips the sign") {
    // S is (I+ - I-)/(2 eps I0); recompute from the report fields
    ElasticityOptions opts;
    opts.n_reps = 2;
    opts.n_threads = 4;
    const ElasticityReport rep = elasticity(small_config(), "alpha_luxs", 0.2, opts);
    const double swapped = (rep.I_minus - rep.I_plus) / (2.0 * rep.epsilon * rep.I0);
    CHECK(swapped == doctest::Approx(-rep.S).epsilon(1e-12));
    CHECK(rep.S == doctest::Approx((rep.I_plus - rep.I_minus) / (2.0 * 0.2 * rep.I0))
                       .epsilon(1e-12));
}

TEST_CASE("parameter names are validated") {
    ElasticityOptions opts;
    opts.n_reps = 1;
    CHECK_THROWS_AS(elasticity(small_config(), "k_resp_typo", 0.2, opts), ConfigError);
    CHECK_THROWS_AS(elasticity(small_config(), "tau_a", 0.0, opts), ConfigError);
    CHECK_THROWS_AS(elasticity(small_config(), "tau_a", 0.7, opts), ConfigError);
}

TEST_CASE("small elasticities at the saturated operating point, reduced community") {
    // The buffered regime: secretion far above K_A pins the averaged
    // information at the estimator ceiling, so +/-20% barely moves it. The
    // acceptance suite checks |S| < 0.05 at full community size.
    SimConfig cfg = small_config();
    for (auto& sp : cfg.species) {
        sp.alpha_luxs *= 100.0;
        sp.sigma_m = 1e-3;
    }
    ElasticityOptions opts;
    opts.n_reps = 2;
    opts.n_threads = 4;
    for (const char* param : {"alpha_luxs", "tau_a", "tau_delta"}) {
        const ElasticityReport rep = elasticity(cfg, param, 0.2, opts);
        CHECK(rep.I0 >= 0.1);
        CHECK(std::fabs(rep.S) < 0.1);
    }
}
