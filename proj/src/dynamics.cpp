#include "tact/dynamics.hpp"

#include <cmath>
#include <utility>

#include "tact/errors.hpp"
#include "tact/kernels.hpp"

namespace tact {

std::string to_string(Ablation ablation) {
    switch (ablation) {
        case Ablation::full: return "full";
        case Ablation::no_thermostat: return "no_thermostat";
        case Ablation::no_tempering: return "no_tempering";
    }
    return "full";
}

Ablation ablation_from_string(const std::string& name) {
    if (name == "full") return Ablation::full;
    if (name == "no_thermostat") return Ablation::no_thermostat;
    if (name == "no_tempering") return Ablation::no_tempering;
    throw InvalidInput("unknown ablation '" + name + "'");
}

void SamplerConfig::validate() const {
    if (eta_theta <= 0.0 || eta_xi <= 0.0) throw InvalidInput("step sizes eta must be positive");
    if (c_theta < 0.0 || c_xi < 0.0) throw InvalidInput("injected-noise levels c must be >= 0");
    if (gamma_theta <= 0.0 || gamma_xi <= 0.0)
        throw InvalidInput("thermal inertias gamma must be positive");
    if (steps_per_unit < 1) throw InvalidInput("K must be >= 1");
    if (bias_bins == 0) throw InvalidInput("bias table needs at least one bin");
    if (metadynamics_height <= 0.0 && bias_mode == BiasMode::metadynamics)
        throw InvalidInput("metadynamics height h_A must be positive");
}

std::vector<double> SampleStore::component(std::size_t d) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = samples[i * dim + d];
    return out;
}

bool collection_predicate(const SystemState& state, const SamplerConfig& config,
                          const TemperingProfile& profile) {
    if (state.step == 0 || state.step % config.steps_per_unit != 0) return false;
    return on_plateau(profile, state.xi);
}

TactSampler::TactSampler(SamplerConfig config, TemperingProfile profile,
                         std::shared_ptr<const Target> target, OracleSpec oracle_spec)
    : config_(std::move(config)),
      profile_(profile),
      oracle_(std::move(target),
              Oracle::Settings{oracle_spec.potential_noise_std, oracle_spec.force_noise_std,
                               oracle_spec.batch_size,
                               derive_stream_seed(config_.seed, 3),
                               derive_stream_seed(config_.seed, 4)}),
      bias_(config_.bias_bins, profile_.well_halfwidth,
            config_.ablation == Ablation::no_tempering ? BiasMode::none : config_.bias_mode),
      dynamics_rng_(derive_stream_seed(config_.seed, 2)),
      tempering_on_(config_.ablation != Ablation::no_tempering),
      thermostat_on_(config_.ablation != Ablation::no_thermostat) {
    config_.validate();
    profile_.validate();
    const std::size_t d = oracle_.dim();
    if (config_.full_matrix_thermostat) {
        if (d > 3)
            throw InvalidInput("full-matrix thermostat mode supports D <= 3 only (D = " +
                               std::to_string(d) + ")");
        full_thermostat_.dim = d;
        full_thermostat_.z.assign(d * d, 0.0);
    }
    friction_scratch_.assign(d, 0.0);
    initialize();
}

TactSampler::TactSampler(SamplerConfig config, TemperingProfile profile,
                         std::shared_ptr<const Target> target)
    : TactSampler(std::move(config), profile, std::move(target), OracleSpec{}) {}

namespace {

SystemState draw_initial_state(const SamplerConfig& config, const TemperingProfile& profile,
                               const Target& target, RngStream& rng) {
    const std::size_t d = target.dim();
    const bool tempering_on = config.ablation != Ablation::no_tempering;
    SystemState state;
    if (!config.theta_init.empty()) {
        if (config.theta_init.size() != d) throw InvalidInput("theta_init dimension mismatch");
        state.theta = config.theta_init;
    } else {
        state.theta = target.suggested_init();
    }
    // Draw order: r_theta components, r_xi, then xi (uniform on the plateau).
    state.r_theta.resize(d);
    const double sd_theta = std::sqrt(config.eta_theta);
    for (double& r : state.r_theta) r = sd_theta * rng.normal();
    state.r_xi = std::sqrt(config.eta_xi) * rng.normal();
    state.xi = tempering_on ? rng.uniform(-profile.xi0, profile.xi0) : 0.0;
    if (!tempering_on) state.r_xi = 0.0;
    const bool z_at_c = config.ablation != Ablation::no_thermostat;
    state.z_theta = z_at_c ? config.c_theta : 0.0;
    state.z_xi = z_at_c ? config.c_xi : 0.0;
    state.step = 0;
    return state;
}

}  // namespace

void TactSampler::initialize() {
    state_ = draw_initial_state(config_, profile_, oracle_.target(), dynamics_rng_);
    if (config_.full_matrix_thermostat)
        for (std::size_t i = 0; i < full_thermostat_.dim; ++i)
            full_thermostat_.at(i, i) = state_.z_theta;
}

void TactSampler::warm_start_bias(const BiasTable& table) {
    if (table.bin_count() != bias_.bin_count() ||
        std::abs(table.bin_width() - bias_.bin_width()) > 1e-12)
        throw InvalidInput("warm-start bias table geometry does not match the profile");
    bias_ = table;
}

double TactSampler::scalar_kinetic_average() const {
    return kernels::squared_norm(state_.r_theta.data(), state_.r_theta.size()) /
           static_cast<double>(state_.r_theta.size());
}

void TactSampler::check_finite() const {
    const auto bad = [](double v) { return !std::isfinite(v); };
    bool diverged = bad(state_.xi) || bad(state_.r_xi) || bad(state_.z_theta) || bad(state_.z_xi);
    for (std::size_t i = 0; i < state_.theta.size() && !diverged; ++i)
        diverged = bad(state_.theta[i]) || bad(state_.r_theta[i]);
    if (diverged)
        throw DivergenceError(state_.step, "non-finite state component (last finite potential "
                                           "may be recovered from the trace)");
}

TactSampler::StepResult TactSampler::advance() {
    const std::size_t k = state_.step + 1;  // Algorithm step counter, k >= 1
    const std::size_t d = state_.theta.size();
    const double T = profile_.temperature;

    const double lambda = tempering_on_ ? coupling(profile_, state_.xi) : 1.0;
    const double dlambda = tempering_on_ ? coupling_derivative(profile_, state_.xi) : 0.0;
    const double lambda2 = lambda * lambda;

    // Thermostat updates come first and feed the friction below.
    if (thermostat_on_) {
        if (tempering_on_)
            state_.z_xi += dlambda * dlambda *
                           (state_.r_xi * state_.r_xi - T * config_.eta_xi) / config_.gamma_xi;
        if (config_.full_matrix_thermostat) {
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    const double ref = i == j ? T * config_.eta_theta : 0.0;
                    full_thermostat_.at(i, j) +=
                        lambda2 * (state_.r_theta[i] * state_.r_theta[j] - ref) /
                        config_.gamma_theta;
                }
            state_.z_theta = full_thermostat_.at(0, 0);
        } else {
            state_.z_theta += lambda2 * (scalar_kinetic_average() - T * config_.eta_theta) /
                              config_.gamma_theta;
        }
    }

    const double bias_force = tempering_on_ ? bias_.force_at(state_.xi) : 0.0;

    const OracleOutput est = oracle_.evaluate(state_.theta);

    // Momentum updates; the friction terms use the pre-update momenta.
    if (tempering_on_) {
        const double noise_xi =
            std::sqrt(2.0 * config_.c_xi * config_.eta_xi) * dynamics_rng_.normal();
        state_.r_xi += -dlambda * (config_.eta_xi * est.potential_estimate + noise_xi) -
                       dlambda * dlambda * state_.z_xi * state_.r_xi +
                       config_.eta_xi * bias_force;
    }
    const double noise_scale_theta = std::sqrt(2.0 * config_.c_theta * config_.eta_theta);
    if (config_.full_matrix_thermostat) {
        for (std::size_t i = 0; i < d; ++i) {
            double drag = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                drag += full_thermostat_.at(i, j) * state_.r_theta[j];
            friction_scratch_[i] = drag;
        }
        for (std::size_t i = 0; i < d; ++i)
            state_.r_theta[i] += lambda * (config_.eta_theta * est.force_estimate[i] +
                                           noise_scale_theta * dynamics_rng_.normal()) -
                                 lambda2 * friction_scratch_[i];
    } else {
        for (std::size_t i = 0; i < d; ++i)
            state_.r_theta[i] += lambda * (config_.eta_theta * est.force_estimate[i] +
                                           noise_scale_theta * dynamics_rng_.normal()) -
                                 lambda2 * (state_.z_theta * state_.r_theta[i]);
    }

    // Bias deposit happens at the pre-update xi, before xi moves.
    if (tempering_on_) {
        switch (bias_.mode()) {
            case BiasMode::abf_paper:
            case BiasMode::abf_per_bin:
                bias_.abf_update(state_.xi, dlambda, est.potential_estimate, k);
                break;
            case BiasMode::metadynamics:
                bias_.metadynamics_update(state_.xi, config_.metadynamics_height);
                break;
            case BiasMode::none: break;
        }
        const auto [xi_new, r_xi_new] = reflect(profile_, state_.xi + state_.r_xi, state_.r_xi);
        state_.xi = xi_new;
        state_.r_xi = r_xi_new;
    }

    kernels::axpy(1.0, state_.r_theta.data(), state_.theta.data(), d);
    state_.step = k;
    check_finite();

    StepResult result;
    result.lambda = lambda;
    result.potential_estimate = est.potential_estimate;
    result.collected = collection_predicate(state_, config_, profile_);
    if (result.collected && config_.resample_momenta) {
        const double sd_theta = std::sqrt(config_.eta_theta);
        for (double& r : state_.r_theta) r = sd_theta * dynamics_rng_.normal();
        if (tempering_on_)
            state_.r_xi = std::sqrt(config_.eta_xi) * dynamics_rng_.normal();
    }
    return result;
}

SampleStore TactSampler::run(std::size_t n_steps, std::size_t burn_in,
                             std::size_t trace_stride) {
    if (burn_in >= n_steps && n_steps > 0)
        throw InvalidInput("burn_in must be smaller than n_steps");
    SampleStore store;
    store.dim = oracle_.dim();
    for (std::size_t i = 0; i < n_steps; ++i) {
        const StepResult result = advance();
        if (result.collected && state_.step > burn_in) {
            store.samples.insert(store.samples.end(), state_.theta.begin(),
                                 state_.theta.end());
            store.collection_steps.push_back(state_.step);
        }
        if (trace_stride > 0 && state_.step % trace_stride == 0) {
            store.traces.push_back({state_.step, state_.xi,
                                    tempering_on_ ? coupling(profile_, state_.xi) : 1.0,
                                    tempering_on_
                                        ? effective_temperature(profile_, state_.xi)
                                        : profile_.temperature,
                                    state_.z_theta, state_.z_xi, state_.r_xi,
                                    result.potential_estimate});
        }
    }
    return store;
}

SystemState initialize_state(const SamplerConfig& config, const TemperingProfile& profile,
                             const Target& target) {
    config.validate();
    profile.validate();
    RngStream rng(derive_stream_seed(config.seed, 2));
    return draw_initial_state(config, profile, target, rng);
}

SampleStore run_chain(const SamplerConfig& config, const TemperingProfile& profile,
                      std::shared_ptr<const Target> target,
                      TactSampler::OracleSpec oracle_spec, std::size_t n_steps,
                      std::size_t burn_in, std::size_t trace_stride) {
    TactSampler sampler(config, profile, std::move(target), oracle_spec);
    return sampler.run(n_steps, burn_in, trace_stride);
}

double rescaled_hamiltonian(const SystemState& state, const SamplerConfig& config,
                            const TemperingProfile& profile, const Target& target) {
    const double potential = target.potential(state.theta);
    const double kinetic_theta =
        kernels::squared_norm(state.r_theta.data(), state.r_theta.size()) /
        (2.0 * config.eta_theta);
    const double kinetic_xi = state.r_xi * state.r_xi / (2.0 * config.eta_xi);
    return coupling(profile, state.xi) * potential + kinetic_theta + kinetic_xi;
}

}  // namespace tact
