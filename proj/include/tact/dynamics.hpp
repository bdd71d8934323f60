// The TACT-HMC stepper in rescaled variables: per-step thermostat, momentum,
// bias, tempering and position updates, sample collection on the plateau,
// ablation switches, and a small-D full-matrix thermostat verification mode.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tact/models.hpp"
#include "tact/rng.hpp"
#include "tact/tempering.hpp"

namespace tact {

enum class Ablation { full, no_thermostat, no_tempering };

std::string to_string(Ablation ablation);
Ablation ablation_from_string(const std::string& name);

struct SamplerConfig {
    // The 7-tuple [eta_theta, eta_xi, c_theta, c_xi, gamma_theta, gamma_xi, K].
    double eta_theta = 0.0015;
    double eta_xi = 0.0015;
    double c_theta = 0.05;
    double c_xi = 0.05;
    double gamma_theta = 1.0;
    double gamma_xi = 1.0;
    std::size_t steps_per_unit = 50;  // K

    Ablation ablation = Ablation::full;
    BiasMode bias_mode = BiasMode::abf_paper;
    std::size_t bias_bins = 100;            // J
    double metadynamics_height = 1e-3;      // h_A
    bool resample_momenta = true;           // fresh momenta at every collection
    bool full_matrix_thermostat = false;    // D <= 3 verification mode
    std::uint64_t seed = 0;
    std::vector<double> theta_init;         // empty: target's suggested start

    void validate() const;
};

struct SystemState {
    std::vector<double> theta;
    double xi = 0.0;
    std::vector<double> r_theta;  // p_theta * dt / m_theta
    double r_xi = 0.0;            // p_xi * dt / m_xi
    double z_theta = 0.0;         // s_theta * dt
    double z_xi = 0.0;            // s_xi * dt
    std::size_t step = 0;         // completed steps
};

// D x D matrix of theta-thermostats for the verification mode.
struct FullThermostatState {
    std::size_t dim = 0;
    std::vector<double> z;  // row-major D x D

    double& at(std::size_t i, std::size_t j) { return z[i * dim + j]; }
    double at(std::size_t i, std::size_t j) const { return z[i * dim + j]; }
};

struct TraceRecord {
    std::size_t step;
    double xi;
    double lambda;
    double eff_temp;
    double z_theta;
    double z_xi;
    double r_xi;
    double potential_estimate;
};

struct SampleStore {
    std::size_t dim = 0;
    std::vector<double> samples;  // row-major, size() x dim
    std::vector<std::size_t> collection_steps;
    std::vector<TraceRecord> traces;

    std::size_t size() const { return dim == 0 ? 0 : samples.size() / dim; }
    std::span<const double> sample(std::size_t i) const {
        return {samples.data() + i * dim, dim};
    }
    // One coordinate of every sample, for the scalar diagnostics.
    std::vector<double> component(std::size_t d) const;
};

// True when the completed step index is a multiple of K and xi sits on the
// plateau. (Algorithm line "lambda = 0" read as lambda'(xi) = 0: lambda is
// never zero, and posterior samples require unit effective temperature.)
bool collection_predicate(const SystemState& state, const SamplerConfig& config,
                          const TemperingProfile& profile);

// One chain. Owns its state, bias table, oracle and RNG streams; substreams
// for initialization/dynamics noise, oracle noise and batch shuffling are
// derived from config.seed, so a seed fully determines the trajectory.
class TactSampler {
public:
    struct OracleSpec {
        double potential_noise_std = 0.0;
        double force_noise_std = 0.0;
        std::size_t batch_size = 0;  // 0 = full batch
    };

    TactSampler(SamplerConfig config, TemperingProfile profile,
                std::shared_ptr<const Target> target, OracleSpec oracle_spec);
    TactSampler(SamplerConfig config, TemperingProfile profile,
                std::shared_ptr<const Target> target);

    const SystemState& state() const { return state_; }
    SystemState& state() { return state_; }
    const SamplerConfig& config() const { return config_; }
    const TemperingProfile& profile() const { return profile_; }
    const BiasTable& bias() const { return bias_; }
    const FullThermostatState& full_thermostat() const { return full_thermostat_; }
    const Target& target() const { return oracle_.target(); }

    // Reload a previously saved table (ABF warm start).
    void warm_start_bias(const BiasTable& table);

    struct StepResult {
        bool collected = false;
        double lambda = 1.0;
        double potential_estimate = 0.0;
    };

    // One iteration. Throws DivergenceError (with the step index) if any state
    // component leaves the finite range, StepTooLargeError on a double wall hit.
    StepResult advance();

    // Drive n_steps iterations; samples are appended only once step > burn_in,
    // traces every trace_stride steps (0 disables tracing).
    SampleStore run(std::size_t n_steps, std::size_t burn_in, std::size_t trace_stride = 0);

private:
    void initialize();
    void check_finite() const;
    double scalar_kinetic_average() const;

    SamplerConfig config_;
    TemperingProfile profile_;
    Oracle oracle_;
    BiasTable bias_;
    FullThermostatState full_thermostat_;
    SystemState state_;
    RngStream dynamics_rng_;
    bool tempering_on_;
    bool thermostat_on_;
    std::vector<double> friction_scratch_;
};

// Spec-level conveniences.
SystemState initialize_state(const SamplerConfig& config, const TemperingProfile& profile,
                             const Target& target);
SampleStore run_chain(const SamplerConfig& config, const TemperingProfile& profile,
                      std::shared_ptr<const Target> target,
                      TactSampler::OracleSpec oracle_spec, std::size_t n_steps,
                      std::size_t burn_in, std::size_t trace_stride = 0);

// Discrete analog of the extended Hamiltonian in rescaled variables,
// lambda(xi) U(theta) + |r_theta|^2/(2 eta_theta) + r_xi^2/(2 eta_xi);
// the hard-wall confining term is zero inside the well.
double rescaled_hamiltonian(const SystemState& state, const SamplerConfig& config,
                            const TemperingProfile& profile, const Target& target);

}  // namespace tact
