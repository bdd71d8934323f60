// Reference stochastic-gradient samplers (SGLD, SGHMC, SGNHT) behind the
// same oracle interface and trace/sample schemas as the TACT dynamics.
// SGNHT is an alias of the no_tempering ablation, not a reimplementation.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tact/dynamics.hpp"
#include "tact/models.hpp"
#include "tact/rng.hpp"

namespace tact {

enum class BaselineKind { sgld, sghmc, sgnht };

std::string to_string(BaselineKind kind);
BaselineKind baseline_kind_from_string(const std::string& name);

struct BaselineConfig {
    BaselineKind kind = BaselineKind::sgld;
    double step_size = 0.001;
    // SGHMC: the constant friction C (noise N(0, 2 C eps) matches it).
    // SGNHT: the initial thermostat value, Algorithm line 1's c.
    // SGLD: unused.
    double friction_or_noise_level = 0.0;
    std::size_t collection_stride = 1;
    std::uint64_t seed = 0;
    std::vector<double> theta_init;

    void validate() const;
};

struct BaselineState {
    std::vector<double> theta;
    std::vector<double> momentum;  // SGHMC only
    std::size_t step = 0;
};

// Single Euler-Maruyama Langevin step:
// theta += (eps/2) f_tilde + N(0, eps I).
// Returns the oracle estimate the step consumed.
OracleOutput sgld_step(BaselineState& state, Oracle& oracle, const BaselineConfig& config,
                       RngStream& rng);

// SGHMC in the rescaled variables of the dynamics module:
// r += eps f_tilde - C r + N(0, 2 C eps I); theta += r.
OracleOutput sghmc_step(BaselineState& state, Oracle& oracle, const BaselineConfig& config,
                        RngStream& rng);

// The no_tempering SamplerConfig a given SGNHT baseline delegates to.
SamplerConfig sgnht_equivalent_config(const BaselineConfig& config);

// One baseline chain with the same seeding discipline and output schema as
// TactSampler. Samples are collected every collection_stride steps.
class BaselineSampler {
public:
    BaselineSampler(BaselineConfig config, std::shared_ptr<const Target> target,
                    TactSampler::OracleSpec oracle_spec = {});

    const std::vector<double>& theta() const;
    SampleStore run(std::size_t n_steps, std::size_t burn_in, std::size_t trace_stride = 0);

private:
    BaselineConfig config_;
    std::unique_ptr<TactSampler> sgnht_;  // set only for kind == sgnht
    std::unique_ptr<Oracle> oracle_;
    BaselineState state_;
    RngStream rng_;
    double last_potential_ = 0.0;
};

}  // namespace tact
