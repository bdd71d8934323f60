#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "tact/baselines.hpp"
#include "tact/diagnostics.hpp"
#include "tact/models.hpp"

using namespace tact;

namespace {

std::shared_ptr<const Target> standard_normal() {
    return std::make_shared<GaussianMixtureTarget>(GaussianMixtureTarget::standard_normal());
}

}  // namespace

TEST_CASE("sgld: vanishing step leaves theta in place") {
    auto target = standard_normal();
    Oracle oracle(target, {});
    BaselineConfig config;
    config.kind = BaselineKind::sgld;
    config.step_size = 1e-30;
    RngStream rng(1);
    BaselineState state;
    state.theta = {0.0};  // force is zero at the mode
    sgld_step(state, oracle, config, rng);
    CHECK(std::abs(state.theta[0]) < 1e-10);
    CHECK(state.step == 1);
}

TEST_CASE("sgld: long-run variance within 5% on the standard normal") {
    BaselineConfig config;
    config.kind = BaselineKind::sgld;
    config.step_size = 0.01;
    config.collection_stride = 10;
    config.seed = 2;
    BaselineSampler sampler(config, standard_normal());
    const SampleStore store = sampler.run(1000000, 100000);
    const auto theta = store.component(0);
    CHECK(std::abs(mean_of(theta)) < 0.05);
    CHECK(variance_of(theta) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sgld: deterministic under a fixed seed") {
    BaselineConfig config;
    config.kind = BaselineKind::sgld;
    config.step_size = 0.01;
    config.seed = 3;
    BaselineSampler a(config, standard_normal());
    BaselineSampler b(config, standard_normal());
    CHECK(a.run(5000, 0).samples == b.run(5000, 0).samples);
}

TEST_CASE("sghmc: zero friction reduces to naive stochastic HMC") {
    auto target = standard_normal();
    Oracle oracle(target, {});
    BaselineConfig config;
    config.kind = BaselineKind::sghmc;
    config.step_size = 0.01;
    config.friction_or_noise_level = 0.0;
    RngStream rng(4);
    BaselineState state;
    state.theta = {0.8};
    state.momentum = {0.05};
    sghmc_step(state, oracle, config, rng);
    const double r_expected = 0.05 + 0.01 * (-0.8);
    CHECK(state.momentum[0] == r_expected);
    CHECK(state.theta[0] == 0.8 + r_expected);
}

TEST_CASE("sghmc: matched friction and noise recover unit variance") {
    BaselineConfig config;
    config.kind = BaselineKind::sghmc;
    config.step_size = 0.01;
    config.friction_or_noise_level = 0.1;
    config.collection_stride = 10;
    config.seed = 5;
    BaselineSampler sampler(config, standard_normal());
    const SampleStore store = sampler.run(1000000, 100000);
    const auto theta = store.component(0);
    CHECK(std::abs(mean_of(theta)) < 0.05);
    CHECK(variance_of(theta) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sgnht: bit-identical to the no_tempering ablation it aliases") {
    BaselineConfig config;
    config.kind = BaselineKind::sgnht;
    config.step_size = 0.01;
    config.friction_or_noise_level = 0.05;
    config.collection_stride = 10;
    config.seed = 6;
    const TactSampler::OracleSpec noise = {0.0, 0.5, 0};

    BaselineSampler baseline(config, standard_normal(), noise);
    TactSampler ablation(sgnht_equivalent_config(config), TemperingProfile{},
                         standard_normal(), noise);

    const SampleStore a = baseline.run(20000, 1000, 100);
    const SampleStore b = ablation.run(20000, 1000, 100);
    CHECK(a.samples == b.samples);
    CHECK(a.collection_steps == b.collection_steps);
    REQUIRE(a.traces.size() == b.traces.size());
    for (std::size_t i = 0; i < a.traces.size(); ++i)
        CHECK(a.traces[i].z_theta == b.traces[i].z_theta);
}

TEST_CASE("sgnht: thermostat mean tracks the injected noise level") {
    // Stationary mean of z is c + eta sigma^2 / 2; with c = 0 the thermostat
    // has to discover the injected noise on its own.
    BaselineConfig config;
    config.kind = BaselineKind::sgnht;
    config.step_size = 0.01;
    config.friction_or_noise_level = 0.0;
    config.collection_stride = 10;
    config.seed = 7;
    const double sigma = 1.0;
    BaselineSampler sampler(config, standard_normal(), {0.0, sigma, 0});
    const SampleStore store = sampler.run(1500000, 300000, 10);
    std::vector<double> z;
    for (const auto& t : store.traces)
        if (t.step > 300000) z.push_back(t.z_theta);
    const double expected = config.step_size * sigma * sigma / 2.0;
    CHECK(mean_of(z) == doctest::Approx(expected).epsilon(0.15));

    const auto theta = store.component(0);
    CHECK(variance_of(theta) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("baselines: none escape an 8-sigma two-mode target from a single "
          "basin") {
    auto two_mode = std::make_shared<GaussianMixtureTarget>(
        GaussianMixtureTarget({{0.5, {-6.0}, {1.0}}, {0.5, {6.0}, {1.0}}}));
    const std::vector<double> modes = {-6.0, 6.0};
    for (BaselineKind kind :
         {BaselineKind::sgld, BaselineKind::sghmc, BaselineKind::sgnht}) {
        BaselineConfig config;
        config.kind = kind;
        config.step_size = 0.01;
        config.friction_or_noise_level = kind == BaselineKind::sghmc ? 0.1 : 0.05;
        config.collection_stride = 10;
        config.theta_init = {-6.0};
        config.seed = 8;
        BaselineSampler sampler(config, two_mode);
        const SampleStore store = sampler.run(2000000, 400000);
        const auto masses = mode_masses(store.component(0), modes);
        CHECK(masses[1] < 0.05);
    }
}
