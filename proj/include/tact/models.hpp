// Target distributions and the potential/force oracles the samplers consume.
// Potentials are negative unnormalized log posteriors; the additive constant
// chosen per model is documented at each class. Forces are -grad U.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "tact/rng.hpp"

namespace tact {

struct OracleOutput {
    double potential_estimate = 0.0;     // U-tilde
    std::vector<double> force_estimate;  // f-tilde, length D
    bool exact = true;                   // false once noise or a strict subsample entered
};

// Abstract target. One instance is owned per chain (the object itself is
// immutable after construction; RNG state lives outside, in NoiseInjector
// and BatchSchedule).
class Target {
public:
    virtual ~Target() = default;

    virtual std::size_t dim() const = 0;

    // U(theta) with this model's documented constant.
    virtual double potential(std::span<const double> theta) const = 0;
    // f(theta) = -grad U, written into `out` (length dim()).
    virtual void force(std::span<const double> theta, std::span<double> out) const = 0;

    // Dataset-backed models report |D| > 0 and implement the batch forms:
    // U-tilde = prior term + (|D|/|S|) * sum over the batch, and likewise for
    // the force. Averaging over all size-|S| batches reproduces the full
    // quantities exactly.
    virtual std::size_t dataset_size() const { return 0; }
    virtual double potential_batch(std::span<const double> theta,
                                   std::span<const std::size_t> batch) const;
    virtual void force_batch(std::span<const double> theta,
                             std::span<const std::size_t> batch,
                             std::span<double> out) const;

    // Normalized density, available only where a closed form exists.
    virtual bool has_analytic_density() const { return false; }
    virtual double density(std::span<const double> theta) const;

    // Default chain start: prior mean for Bayesian models, origin otherwise.
    virtual std::vector<double> suggested_init() const {
        return std::vector<double>(dim(), 0.0);
    }
};

// Mixture of Gaussians with diagonal covariances.
// Constant convention: U = -log sum_c w_c |Sigma_c|^{-1/2} exp(-r_c^2/2),
// i.e. the (2*pi)^{D/2} factor is dropped, so a standard normal has
// U(theta) = |theta|^2/2 and U(mode) = 0.
class GaussianMixtureTarget : public Target {
public:
    struct Component {
        double weight;
        std::vector<double> mean;
        std::vector<double> variance;  // diagonal entries
    };

    explicit GaussianMixtureTarget(std::vector<Component> components);

    static GaussianMixtureTarget standard_normal(std::size_t dim = 1);
    static GaussianMixtureTarget single(std::vector<double> mean, std::vector<double> variance);

    std::size_t dim() const override { return dim_; }
    double potential(std::span<const double> theta) const override;
    void force(std::span<const double> theta, std::span<double> out) const override;
    bool has_analytic_density() const override { return true; }
    double density(std::span<const double> theta) const override;

    const std::vector<Component>& components() const { return components_; }

private:
    // log w_c - (1/2) sum_d log var_cd - (1/2) r_c^2 for each component.
    void component_log_terms(std::span<const double> theta, std::span<double> out) const;

    std::vector<Component> components_;
    std::vector<double> log_weight_minus_half_logdet_;
    std::size_t dim_;
};

// Gaussian likelihood with conjugate Gaussian prior: prior N(m0, s0^2 I),
// x_i ~ N(theta, s^2 I). The posterior is Gaussian in closed form.
// Constant convention: the likelihood term is measured relative to the data
// mean, U = |theta-m0|^2/(2 s0^2) + |D| |theta - xbar|^2/(2 s^2), which keeps
// U at posterior scale regardless of |D|.
class ConjugateGaussianModel : public Target {
public:
    ConjugateGaussianModel(std::vector<double> prior_mean, double prior_variance,
                           double observation_variance,
                           std::vector<std::vector<double>> dataset);

    std::size_t dim() const override { return prior_mean_.size(); }
    double potential(std::span<const double> theta) const override;
    void force(std::span<const double> theta, std::span<double> out) const override;

    std::size_t dataset_size() const override { return n_data_; }
    double potential_batch(std::span<const double> theta,
                           std::span<const std::size_t> batch) const override;
    void force_batch(std::span<const double> theta, std::span<const std::size_t> batch,
                     std::span<double> out) const override;

    bool has_analytic_density() const override { return true; }
    double density(std::span<const double> theta) const override;

    std::vector<double> suggested_init() const override { return prior_mean_; }

    // Closed-form posterior (isotropic): N(mean, variance * I).
    std::vector<double> posterior_mean() const;
    double posterior_variance() const;

private:
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * dim(), dim()};
    }

    std::vector<double> prior_mean_;
    double prior_variance_;
    double observation_variance_;
    std::vector<double> data_;  // row-major, n_data_ x dim
    std::size_t n_data_;
    std::vector<double> data_mean_;       // xbar
    std::vector<double> anchor_per_row_;  // |x_i - xbar|^2 per observation
};

// Bayesian logistic regression with N(0, s0^2 I) prior on (weights, bias).
// theta has dimension D = n_features + 1; the last coordinate is the bias.
// Constant convention: each point's negative log likelihood is shifted by
// -log 2 so the likelihood term vanishes at theta = 0.
class LogisticRegressionModel : public Target {
public:
    LogisticRegressionModel(std::vector<std::vector<double>> features,
                            std::vector<int> labels, double prior_variance);

    std::size_t dim() const override { return n_features_ + 1; }
    double potential(std::span<const double> theta) const override;
    void force(std::span<const double> theta, std::span<double> out) const override;

    std::size_t dataset_size() const override { return labels_.size(); }
    double potential_batch(std::span<const double> theta,
                           std::span<const std::size_t> batch) const override;
    void force_batch(std::span<const double> theta, std::span<const std::size_t> batch,
                     std::span<double> out) const override;

private:
    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * n_features_, n_features_};
    }
    double point_nll(std::span<const double> theta, std::size_t i) const;
    void accumulate_point_force(std::span<const double> theta, std::size_t i, double scale,
                                std::span<double> out) const;

    std::vector<double> features_;  // row-major, n x n_features
    std::vector<int> labels_;
    std::size_t n_features_;
    double prior_variance_;
};

// Zero-mean Gaussian perturbation of the oracle outputs with fixed standard
// deviations; force noise is isotropic. Owns its RNG stream.
class NoiseInjector {
public:
    NoiseInjector(double potential_noise_std, double force_noise_std, std::uint64_t seed);

    void apply(OracleOutput& out);
    bool active() const { return potential_noise_std_ > 0.0 || force_noise_std_ > 0.0; }
    double potential_noise_std() const { return potential_noise_std_; }
    double force_noise_std() const { return force_noise_std_; }

private:
    double potential_noise_std_;
    double force_noise_std_;
    RngStream rng_;
};

// Epoch-shuffled mini-batch index stream: each epoch is a fresh seeded
// permutation cut into consecutive batches; a short final batch is kept and
// callers scale by the actual batch size.
class BatchSchedule {
public:
    BatchSchedule(std::size_t dataset_size, std::size_t batch_size, std::uint64_t seed);

    std::span<const std::size_t> next();
    std::size_t batch_size() const { return batch_size_; }
    std::size_t dataset_size() const { return dataset_size_; }

private:
    void reshuffle();

    std::size_t dataset_size_;
    std::size_t batch_size_;
    std::uint64_t base_seed_;
    std::uint64_t epoch_ = 0;
    std::size_t cursor_ = 0;
    std::vector<std::size_t> permutation_;
};

// Spec-level operations (validated entry points used by samplers and tests).
double exact_potential(const Target& target, std::span<const double> theta);
std::vector<double> exact_force(const Target& target, std::span<const double> theta);
OracleOutput noisy_oracle(const Target& target, NoiseInjector& injector,
                          std::span<const double> theta);
OracleOutput minibatch_oracle(const Target& target, std::span<const double> theta,
                              std::span<const std::size_t> batch);
double analytic_density(const Target& target, std::span<const double> theta);

// What the dynamics consume: target + optional noise injection + optional
// mini-batching behind a single evaluate() call.
class Oracle {
public:
    struct Settings {
        double potential_noise_std = 0.0;
        double force_noise_std = 0.0;
        std::size_t batch_size = 0;  // 0 = full batch
        std::uint64_t noise_seed = 0;
        std::uint64_t schedule_seed = 0;
    };

    Oracle(std::shared_ptr<const Target> target, const Settings& settings);

    std::size_t dim() const { return target_->dim(); }
    const Target& target() const { return *target_; }

    // One dynamics-step evaluation: advances the batch schedule and noise
    // stream as configured.
    OracleOutput evaluate(std::span<const double> theta);
    // Full-batch, noise-free reference.
    OracleOutput evaluate_exact(std::span<const double> theta) const;

private:
    std::shared_ptr<const Target> target_;
    std::optional<NoiseInjector> injector_;
    std::optional<BatchSchedule> schedule_;
};

}  // namespace tact
