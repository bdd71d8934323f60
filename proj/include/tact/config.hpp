// Experiment configuration: the "[section]" / "key = value" grammar, flag
// overrides of the form --section.key=value, defaults, constraint checks and
// the canonical serialization used by manifests. Unknown keys are an error.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tact {

struct ModelSection {
    std::string kind = "gaussian_mixture";  // | conjugate_gaussian | logistic_regression

    // gaussian_mixture (defaults are the documented desk-scale three-mode
    // target; all of these are configuration, not constants).
    std::vector<double> weights = {0.3, 0.4, 0.3};
    std::vector<std::vector<double>> means = {{-4.0}, {0.0}, {6.0}};
    std::vector<std::vector<double>> variances = {{0.36}, {0.64}, {0.25}};

    // conjugate_gaussian
    std::vector<double> prior_mean = {0.0};
    double prior_variance = 10.0;
    double observation_variance = 1.0;
    std::vector<double> data_location = {0.5};  // synthetic data mean
    std::size_t n_observations = 200;

    // logistic_regression (prior_variance above is reused for the prior)
    std::size_t n_features = 2;
    std::vector<double> true_theta = {1.0, -1.0, 0.5};  // weights then bias

    // shared dataset controls
    std::string dataset_file;     // CSV path; empty = synthesize
    std::uint64_t data_seed = 1;

    // noise injection and mini-batching
    double potential_noise_std = 0.0;
    double force_noise_std = 0.0;
    std::size_t batch_size = 0;  // 0 = full batch

    std::vector<double> theta_init;  // empty = model's documented default start

    bool operator==(const ModelSection&) const = default;
};

struct SamplerSection {
    std::string method = "tact";  // | sgld | sghmc | sgnht
                                  // | ablation_no_thermostat | ablation_no_tempering
    // the 7-tuple
    double eta_theta = 0.0015;
    double eta_xi = 0.0015;
    double c_theta = 0.05;
    double c_xi = 0.05;
    double gamma_theta = 1.0;
    double gamma_xi = 1.0;
    std::size_t steps_per_unit = 50;  // K

    // tempering profile
    double xi0 = 1.0 / 3.0;
    double xi1 = 1.0;
    std::size_t coupling_exponent = 3;  // n
    double well_halfwidth = 5.0 / 3.0;  // W0
    double temperature = 1.0;

    // bias
    std::string bias_mode = "abf_paper";
    std::size_t bias_bins = 100;          // J
    double metadynamics_height = 1e-3;    // h_A
    std::string bias_warm_start;          // bias_table.csv path; empty = cold start

    bool resample_momenta = true;

    // baselines
    double step_size = 0.001;
    double friction = 0.1;  // SGHMC friction C / SGNHT initial thermostat

    bool operator==(const SamplerSection&) const = default;
};

struct RunSection {
    std::size_t n_steps = 200000;
    std::size_t burn_in = kAutoBurnIn;  // resolved to n_steps/5 when left unset
    std::size_t n_chains = 1;
    std::uint64_t seed = 0;
    std::size_t trace_stride = 100;  // 0 disables traces
    std::string output_dir = "out";
    std::size_t jobs = 0;  // worker pool size; 0 = available parallelism

    static constexpr std::size_t kAutoBurnIn = static_cast<std::size_t>(-1);

    bool operator==(const RunSection&) const = default;
};

struct DiagnosticsSection {
    std::size_t histogram_bins = 200;
    double histogram_min = 0.0;  // min == max: range taken from the samples
    double histogram_max = 0.0;
    std::size_t ess_max_lag = 1000;
    std::size_t xi_bins = 50;
    bool gate = false;  // exit code 4 when a thresholded metric fails
    double tv_threshold = 0.05;
    double xi_flatness_threshold = 0.10;
    double unity_fraction_min = 0.15;
    double unity_fraction_max = 0.25;
    double ess_min = 0.0;

    bool operator==(const DiagnosticsSection&) const = default;
};

struct TuningSection {
    std::vector<double> step_sizes = {0.0005, 0.001, 0.005, 0.01};
    std::vector<double> frictions = {0.01, 0.1, 1.0};
    std::size_t tune_steps = 100000;

    bool operator==(const TuningSection&) const = default;
};

struct ExperimentSpec {
    ModelSection model;
    SamplerSection sampler;
    RunSection run;
    DiagnosticsSection diagnostics;
    TuningSection tuning;

    bool operator==(const ExperimentSpec&) const = default;
};

// Parse config text; then apply overrides ("section.key=value" or
// "--section.key=value"); resolve derived defaults; check constraints.
// Throws ParseError naming the offending key.
ExperimentSpec parse_config_text(const std::string& text,
                                 const std::vector<std::string>& overrides = {});
ExperimentSpec parse_config_file(const std::string& path,
                                 const std::vector<std::string>& overrides = {});

// Canonical text form; parse_config_text(serialize_config(s)) == s.
std::string serialize_config(const ExperimentSpec& spec);

// Resolve derived defaults (auto burn-in) on a hand-built spec.
ExperimentSpec resolved(ExperimentSpec spec);

}  // namespace tact
