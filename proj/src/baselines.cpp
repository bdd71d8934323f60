#include "tact/baselines.hpp"

#include <cmath>

#include "tact/errors.hpp"
#include "tact/kernels.hpp"

namespace tact {

std::string to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::sgld: return "sgld";
        case BaselineKind::sghmc: return "sghmc";
        case BaselineKind::sgnht: return "sgnht";
    }
    return "sgld";
}

BaselineKind baseline_kind_from_string(const std::string& name) {
    if (name == "sgld") return BaselineKind::sgld;
    if (name == "sghmc") return BaselineKind::sghmc;
    if (name == "sgnht") return BaselineKind::sgnht;
    throw InvalidInput("unknown baseline '" + name + "'");
}

void BaselineConfig::validate() const {
    if (step_size <= 0.0) throw InvalidInput("baseline step size must be positive");
    if (friction_or_noise_level < 0.0)
        throw InvalidInput("friction / noise level must be >= 0");
    if (collection_stride < 1) throw InvalidInput("collection stride must be >= 1");
}

namespace {

void check_finite(const BaselineState& state) {
    for (double v : state.theta)
        if (!std::isfinite(v)) throw DivergenceError(state.step, "non-finite theta");
    for (double v : state.momentum)
        if (!std::isfinite(v)) throw DivergenceError(state.step, "non-finite momentum");
}

}  // namespace

OracleOutput sgld_step(BaselineState& state, Oracle& oracle, const BaselineConfig& config,
                       RngStream& rng) {
    const double eps = config.step_size;
    OracleOutput est = oracle.evaluate(state.theta);
    const double noise_sd = std::sqrt(eps);
    for (std::size_t i = 0; i < state.theta.size(); ++i)
        state.theta[i] += 0.5 * eps * est.force_estimate[i] + noise_sd * rng.normal();
    ++state.step;
    check_finite(state);
    return est;
}

OracleOutput sghmc_step(BaselineState& state, Oracle& oracle, const BaselineConfig& config,
                        RngStream& rng) {
    const double eps = config.step_size;
    const double friction = config.friction_or_noise_level;
    const double noise_sd = std::sqrt(2.0 * friction * eps);
    OracleOutput est = oracle.evaluate(state.theta);
    for (std::size_t i = 0; i < state.momentum.size(); ++i)
        state.momentum[i] += eps * est.force_estimate[i] - friction * state.momentum[i] +
                             noise_sd * rng.normal();
    kernels::axpy(1.0, state.momentum.data(), state.theta.data(), state.theta.size());
    ++state.step;
    check_finite(state);
    return est;
}

SamplerConfig sgnht_equivalent_config(const BaselineConfig& config) {
    SamplerConfig out;
    out.eta_theta = config.step_size;
    out.eta_xi = config.step_size;  // unused under no_tempering
    out.c_theta = config.friction_or_noise_level;
    out.c_xi = 0.0;
    out.gamma_theta = 1.0;
    out.gamma_xi = 1.0;
    out.steps_per_unit = config.collection_stride;
    out.ablation = Ablation::no_tempering;
    out.bias_mode = BiasMode::none;
    out.resample_momenta = false;
    out.seed = config.seed;
    out.theta_init = config.theta_init;
    return out;
}

BaselineSampler::BaselineSampler(BaselineConfig config, std::shared_ptr<const Target> target,
                                 TactSampler::OracleSpec oracle_spec)
    : config_(std::move(config)), rng_(derive_stream_seed(config_.seed, 2)) {
    config_.validate();
    if (config_.kind == BaselineKind::sgnht) {
        sgnht_ = std::make_unique<TactSampler>(sgnht_equivalent_config(config_),
                                               TemperingProfile{}, std::move(target),
                                               oracle_spec);
        return;
    }
    oracle_ = std::make_unique<Oracle>(
        std::move(target),
        Oracle::Settings{oracle_spec.potential_noise_std, oracle_spec.force_noise_std,
                         oracle_spec.batch_size, derive_stream_seed(config_.seed, 3),
                         derive_stream_seed(config_.seed, 4)});
    const std::size_t d = oracle_->dim();
    if (!config_.theta_init.empty()) {
        if (config_.theta_init.size() != d)
            throw InvalidInput("theta_init dimension mismatch");
        state_.theta = config_.theta_init;
    } else {
        state_.theta = oracle_->target().suggested_init();
    }
    if (config_.kind == BaselineKind::sghmc) {
        state_.momentum.resize(d);
        const double sd = std::sqrt(config_.step_size);
        for (double& r : state_.momentum) r = sd * rng_.normal();
    }
}

const std::vector<double>& BaselineSampler::theta() const {
    return sgnht_ ? sgnht_->state().theta : state_.theta;
}

SampleStore BaselineSampler::run(std::size_t n_steps, std::size_t burn_in,
                                 std::size_t trace_stride) {
    if (sgnht_) return sgnht_->run(n_steps, burn_in, trace_stride);
    if (burn_in >= n_steps && n_steps > 0)
        throw InvalidInput("burn_in must be smaller than n_steps");
    SampleStore store;
    store.dim = state_.theta.size();
    for (std::size_t i = 0; i < n_steps; ++i) {
        const OracleOutput est = config_.kind == BaselineKind::sgld
                                     ? sgld_step(state_, *oracle_, config_, rng_)
                                     : sghmc_step(state_, *oracle_, config_, rng_);
        last_potential_ = est.potential_estimate;

        if (state_.step % config_.collection_stride == 0 && state_.step > burn_in) {
            store.samples.insert(store.samples.end(), state_.theta.begin(),
                                 state_.theta.end());
            store.collection_steps.push_back(state_.step);
        }
        if (trace_stride > 0 && state_.step % trace_stride == 0) {
            const double z = config_.kind == BaselineKind::sghmc
                                 ? config_.friction_or_noise_level
                                 : 0.0;
            store.traces.push_back(
                {state_.step, 0.0, 1.0, 1.0, z, 0.0, 0.0, last_potential_});
        }
    }
    return store;
}

}  // namespace tact
