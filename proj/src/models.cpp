#include "tact/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tact/errors.hpp"
#include "tact/kernels.hpp"

namespace tact {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2

void require_finite(std::span<const double> theta, std::size_t expected_dim) {
    if (theta.size() != expected_dim)
        throw InvalidInput("theta has dimension " + std::to_string(theta.size()) +
                           ", model expects " + std::to_string(expected_dim));
    for (double v : theta)
        if (!std::isfinite(v)) throw InvalidInput("non-finite component in theta");
}

void require_batch(std::span<const std::size_t> batch, std::size_t n_data) {
    if (batch.empty()) throw InvalidInput("empty mini-batch");
    for (std::size_t i : batch)
        if (i >= n_data)
            throw InvalidInput("batch index " + std::to_string(i) + " out of range (|D| = " +
                               std::to_string(n_data) + ")");
}

// log(1 + e^z) without overflow.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Target defaults
// ---------------------------------------------------------------------------

double Target::potential_batch(std::span<const double> theta,
                               std::span<const std::size_t> /*batch*/) const {
    return potential(theta);
}

void Target::force_batch(std::span<const double> theta, std::span<const std::size_t> /*batch*/,
                         std::span<double> out) const {
    force(theta, out);
}

double Target::density(std::span<const double> /*theta*/) const {
    throw UnsupportedTargetError("this target has no closed-form normalized density");
}

// ---------------------------------------------------------------------------
// GaussianMixtureTarget
// ---------------------------------------------------------------------------

GaussianMixtureTarget::GaussianMixtureTarget(std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw InvalidInput("mixture needs at least one component");
    dim_ = components_.front().mean.size();
    double weight_sum = 0.0;
    for (const auto& c : components_) {
        if (c.weight <= 0.0) throw InvalidInput("mixture weights must be strictly positive");
        if (c.mean.size() != dim_ || c.variance.size() != dim_)
            throw InvalidInput("mixture component dimensions disagree");
        for (double v : c.variance)
            if (v <= 0.0) throw InvalidInput("mixture variances must be strictly positive");
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-12)
        throw InvalidInput("mixture weights must sum to 1 (got " + std::to_string(weight_sum) +
                           ")");
    log_weight_minus_half_logdet_.reserve(components_.size());
    for (const auto& c : components_) {
        double half_logdet = 0.0;
        for (double v : c.variance) half_logdet += 0.5 * std::log(v);
        log_weight_minus_half_logdet_.push_back(std::log(c.weight) - half_logdet);
    }
}

GaussianMixtureTarget GaussianMixtureTarget::standard_normal(std::size_t dim) {
    return single(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

GaussianMixtureTarget GaussianMixtureTarget::single(std::vector<double> mean,
                                                    std::vector<double> variance) {
    std::vector<Component> comps;
    comps.push_back({1.0, std::move(mean), std::move(variance)});
    return GaussianMixtureTarget(std::move(comps));
}

void GaussianMixtureTarget::component_log_terms(std::span<const double> theta,
                                                std::span<double> out) const {
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto& comp = components_[c];
        double quad = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) {
            const double r = theta[d] - comp.mean[d];
            quad += r * r / comp.variance[d];
        }
        out[c] = log_weight_minus_half_logdet_[c] - 0.5 * quad;
    }
}

double GaussianMixtureTarget::potential(std::span<const double> theta) const {
    std::vector<double> terms(components_.size());
    component_log_terms(theta, terms);
    const double m = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - m);
    return -(m + std::log(acc));
}

void GaussianMixtureTarget::force(std::span<const double> theta, std::span<double> out) const {
    std::vector<double> terms(components_.size());
    component_log_terms(theta, terms);
    const double m = *std::max_element(terms.begin(), terms.end());
    double norm = 0.0;
    for (double& t : terms) {
        t = std::exp(t - m);
        norm += t;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto& comp = components_[c];
        const double resp = terms[c] / norm;
        for (std::size_t d = 0; d < dim_; ++d)
            out[d] += resp * (comp.mean[d] - theta[d]) / comp.variance[d];
    }
}

double GaussianMixtureTarget::density(std::span<const double> theta) const {
    return std::exp(-potential(theta) - static_cast<double>(dim_) * kHalfLog2Pi);
}

// ---------------------------------------------------------------------------
// ConjugateGaussianModel
// ---------------------------------------------------------------------------

ConjugateGaussianModel::ConjugateGaussianModel(std::vector<double> prior_mean,
                                               double prior_variance,
                                               double observation_variance,
                                               std::vector<std::vector<double>> dataset)
    : prior_mean_(std::move(prior_mean)),
      prior_variance_(prior_variance),
      observation_variance_(observation_variance),
      n_data_(dataset.size()) {
    if (prior_mean_.empty()) throw InvalidInput("prior mean must be nonempty");
    if (prior_variance_ <= 0.0 || observation_variance_ <= 0.0)
        throw InvalidInput("variances must be strictly positive");
    if (n_data_ == 0) throw InvalidInput("conjugate model needs at least one observation");
    const std::size_t d = prior_mean_.size();
    data_.reserve(n_data_ * d);
    data_mean_.assign(d, 0.0);
    for (const auto& x : dataset) {
        if (x.size() != d) throw InvalidInput("observation dimension mismatch");
        data_.insert(data_.end(), x.begin(), x.end());
        for (std::size_t j = 0; j < d; ++j) data_mean_[j] += x[j];
    }
    for (double& v : data_mean_) v /= static_cast<double>(n_data_);
    anchor_per_row_.resize(n_data_);
    for (std::size_t i = 0; i < n_data_; ++i) {
        double acc = 0.0;
        const auto r = row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = r[j] - data_mean_[j];
            acc += dev * dev;
        }
        anchor_per_row_[i] = acc;
    }
}

double ConjugateGaussianModel::potential(std::span<const double> theta) const {
    const std::size_t d = dim();
    double prior_quad = 0.0;
    double dist_to_mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double p = theta[j] - prior_mean_[j];
        prior_quad += p * p;
        const double q = theta[j] - data_mean_[j];
        dist_to_mean += q * q;
    }
    return prior_quad / (2.0 * prior_variance_) +
           static_cast<double>(n_data_) * dist_to_mean / (2.0 * observation_variance_);
}

void ConjugateGaussianModel::force(std::span<const double> theta, std::span<double> out) const {
    const std::size_t d = dim();
    const double like_scale = static_cast<double>(n_data_) / observation_variance_;
    for (std::size_t j = 0; j < d; ++j)
        out[j] = -(theta[j] - prior_mean_[j]) / prior_variance_ -
                 like_scale * (theta[j] - data_mean_[j]);
}

double ConjugateGaussianModel::potential_batch(std::span<const double> theta,
                                               std::span<const std::size_t> batch) const {
    const std::size_t d = dim();
    const double scale =
        static_cast<double>(n_data_) / static_cast<double>(batch.size());
    double prior_quad = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double p = theta[j] - prior_mean_[j];
        prior_quad += p * p;
    }
    // Per point: |x_i - theta|^2 - |x_i - xbar|^2 keeps the likelihood term
    // anchored at the data mean, same constant as the full-batch form.
    double like = 0.0;
    for (std::size_t i : batch) {
        const auto r = row(i);
        double quad = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = r[j] - theta[j];
            quad += dev * dev;
        }
        like += quad - anchor_per_row_[i];
    }
    return prior_quad / (2.0 * prior_variance_) + scale * like / (2.0 * observation_variance_);
}

void ConjugateGaussianModel::force_batch(std::span<const double> theta,
                                         std::span<const std::size_t> batch,
                                         std::span<double> out) const {
    const std::size_t d = dim();
    std::vector<double> batch_sum(d, 0.0);
    for (std::size_t i : batch) kernels::axpy(1.0, row(i).data(), batch_sum.data(), d);
    const double scale =
        static_cast<double>(n_data_) / static_cast<double>(batch.size());
    const double b = static_cast<double>(batch.size());
    for (std::size_t j = 0; j < d; ++j)
        out[j] = -(theta[j] - prior_mean_[j]) / prior_variance_ +
                 scale * (batch_sum[j] - b * theta[j]) / observation_variance_;
}

std::vector<double> ConjugateGaussianModel::posterior_mean() const {
    const double precision =
        1.0 / prior_variance_ + static_cast<double>(n_data_) / observation_variance_;
    std::vector<double> mean(dim());
    for (std::size_t j = 0; j < dim(); ++j)
        mean[j] = (prior_mean_[j] / prior_variance_ +
                   static_cast<double>(n_data_) * data_mean_[j] / observation_variance_) /
                  precision;
    return mean;
}

double ConjugateGaussianModel::posterior_variance() const {
    return 1.0 / (1.0 / prior_variance_ +
                  static_cast<double>(n_data_) / observation_variance_);
}

double ConjugateGaussianModel::density(std::span<const double> theta) const {
    const auto mean = posterior_mean();
    const double var = posterior_variance();
    double quad = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) {
        const double r = theta[j] - mean[j];
        quad += r * r;
    }
    const double d = static_cast<double>(dim());
    return std::exp(-0.5 * quad / var - d * kHalfLog2Pi - 0.5 * d * std::log(var));
}

// ---------------------------------------------------------------------------
// LogisticRegressionModel
// ---------------------------------------------------------------------------

LogisticRegressionModel::LogisticRegressionModel(std::vector<std::vector<double>> features,
                                                 std::vector<int> labels,
                                                 double prior_variance)
    : labels_(std::move(labels)), prior_variance_(prior_variance) {
    if (features.empty() || features.size() != labels_.size())
        throw InvalidInput("logistic model needs matching nonempty features and labels");
    if (prior_variance_ <= 0.0) throw InvalidInput("prior variance must be positive");
    n_features_ = features.front().size();
    if (n_features_ == 0) throw InvalidInput("logistic model needs at least one feature");
    features_.reserve(features.size() * n_features_);
    for (const auto& x : features) {
        if (x.size() != n_features_) throw InvalidInput("feature dimension mismatch");
        features_.insert(features_.end(), x.begin(), x.end());
    }
    for (int y : labels_)
        if (y != 0 && y != 1) throw InvalidInput("labels must be 0 or 1");
}

double LogisticRegressionModel::point_nll(std::span<const double> theta, std::size_t i) const {
    const auto x = row(i);
    const double z = kernels::dot(theta.data(), x.data(), n_features_) + theta[n_features_];
    // softplus(z) - y z - log 2: vanishes at theta = 0.
    return softplus(z) - static_cast<double>(labels_[i]) * z - 0.6931471805599453094;
}

void LogisticRegressionModel::accumulate_point_force(std::span<const double> theta,
                                                     std::size_t i, double scale,
                                                     std::span<double> out) const {
    const auto x = row(i);
    const double z = kernels::dot(theta.data(), x.data(), n_features_) + theta[n_features_];
    const double resid = static_cast<double>(labels_[i]) - sigmoid(z);
    kernels::axpy(scale * resid, x.data(), out.data(), n_features_);
    out[n_features_] += scale * resid;
}

double LogisticRegressionModel::potential(std::span<const double> theta) const {
    double nll = 0.0;
    for (std::size_t i = 0; i < labels_.size(); ++i) nll += point_nll(theta, i);
    return kernels::squared_norm(theta.data(), theta.size()) / (2.0 * prior_variance_) + nll;
}

void LogisticRegressionModel::force(std::span<const double> theta,
                                    std::span<double> out) const {
    for (std::size_t j = 0; j < theta.size(); ++j) out[j] = -theta[j] / prior_variance_;
    for (std::size_t i = 0; i < labels_.size(); ++i)
        accumulate_point_force(theta, i, 1.0, out);
}

double LogisticRegressionModel::potential_batch(std::span<const double> theta,
                                                std::span<const std::size_t> batch) const {
    const double scale =
        static_cast<double>(labels_.size()) / static_cast<double>(batch.size());
    double nll = 0.0;
    for (std::size_t i : batch) nll += point_nll(theta, i);
    return kernels::squared_norm(theta.data(), theta.size()) / (2.0 * prior_variance_) +
           scale * nll;
}

void LogisticRegressionModel::force_batch(std::span<const double> theta,
                                          std::span<const std::size_t> batch,
                                          std::span<double> out) const {
    const double scale =
        static_cast<double>(labels_.size()) / static_cast<double>(batch.size());
    for (std::size_t j = 0; j < theta.size(); ++j) out[j] = -theta[j] / prior_variance_;
    for (std::size_t i : batch) accumulate_point_force(theta, i, scale, out);
}

// ---------------------------------------------------------------------------
// NoiseInjector / BatchSchedule
// ---------------------------------------------------------------------------

NoiseInjector::NoiseInjector(double potential_noise_std, double force_noise_std,
                             std::uint64_t seed)
    : potential_noise_std_(potential_noise_std),
      force_noise_std_(force_noise_std),
      rng_(seed) {
    if (potential_noise_std_ < 0.0 || force_noise_std_ < 0.0)
        throw InvalidInput("noise standard deviations must be nonnegative");
}

void NoiseInjector::apply(OracleOutput& out) {
    // Draw order is fixed: potential first, then force components.
    if (potential_noise_std_ > 0.0)
        out.potential_estimate += potential_noise_std_ * rng_.normal();
    if (force_noise_std_ > 0.0)
        for (double& f : out.force_estimate) f += force_noise_std_ * rng_.normal();
    if (active()) out.exact = false;
}

BatchSchedule::BatchSchedule(std::size_t dataset_size, std::size_t batch_size,
                             std::uint64_t seed)
    : dataset_size_(dataset_size), batch_size_(batch_size), base_seed_(seed) {
    if (dataset_size_ == 0) throw InvalidInput("dataset is empty");
    if (batch_size_ == 0 || batch_size_ > dataset_size_)
        throw InvalidInput("batch size must be in [1, |D|]");
    permutation_.resize(dataset_size_);
    reshuffle();
}

void BatchSchedule::reshuffle() {
    for (std::size_t i = 0; i < dataset_size_; ++i) permutation_[i] = i;
    RngStream rng(derive_stream_seed(base_seed_, epoch_));
    for (std::size_t i = dataset_size_ - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(permutation_[i], permutation_[j]);
    }
    cursor_ = 0;
    ++epoch_;
}

std::span<const std::size_t> BatchSchedule::next() {
    if (cursor_ >= dataset_size_) reshuffle();
    const std::size_t len = std::min(batch_size_, dataset_size_ - cursor_);
    std::span<const std::size_t> out(permutation_.data() + cursor_, len);
    cursor_ += len;
    return out;
}

// ---------------------------------------------------------------------------
// Spec-level operations
// ---------------------------------------------------------------------------

double exact_potential(const Target& target, std::span<const double> theta) {
    require_finite(theta, target.dim());
    return target.potential(theta);
}

std::vector<double> exact_force(const Target& target, std::span<const double> theta) {
    require_finite(theta, target.dim());
    std::vector<double> out(target.dim());
    target.force(theta, out);
    return out;
}

OracleOutput noisy_oracle(const Target& target, NoiseInjector& injector,
                          std::span<const double> theta) {
    require_finite(theta, target.dim());
    OracleOutput out;
    out.potential_estimate = target.potential(theta);
    out.force_estimate.resize(target.dim());
    target.force(theta, out.force_estimate);
    out.exact = true;
    injector.apply(out);
    return out;
}

OracleOutput minibatch_oracle(const Target& target, std::span<const double> theta,
                              std::span<const std::size_t> batch) {
    require_finite(theta, target.dim());
    require_batch(batch, target.dataset_size());
    OracleOutput out;
    out.potential_estimate = target.potential_batch(theta, batch);
    out.force_estimate.resize(target.dim());
    target.force_batch(theta, batch, out.force_estimate);
    out.exact = batch.size() == target.dataset_size();
    return out;
}

double analytic_density(const Target& target, std::span<const double> theta) {
    require_finite(theta, target.dim());
    if (!target.has_analytic_density())
        throw UnsupportedTargetError("target has no analytic density");
    return target.density(theta);
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

Oracle::Oracle(std::shared_ptr<const Target> target, const Settings& settings)
    : target_(std::move(target)) {
    if (!target_) throw InvalidInput("oracle needs a target");
    if (settings.potential_noise_std > 0.0 || settings.force_noise_std > 0.0)
        injector_.emplace(settings.potential_noise_std, settings.force_noise_std,
                          settings.noise_seed);
    if (settings.batch_size > 0) {
        if (target_->dataset_size() == 0)
            throw InvalidInput("mini-batching requested for a target without a dataset");
        schedule_.emplace(target_->dataset_size(), settings.batch_size,
                          settings.schedule_seed);
    }
}

OracleOutput Oracle::evaluate(std::span<const double> theta) {
    require_finite(theta, target_->dim());
    OracleOutput out;
    out.force_estimate.resize(target_->dim());
    if (schedule_) {
        const auto batch = schedule_->next();
        out.potential_estimate = target_->potential_batch(theta, batch);
        target_->force_batch(theta, batch, out.force_estimate);
        out.exact = batch.size() == target_->dataset_size();
    } else {
        out.potential_estimate = target_->potential(theta);
        target_->force(theta, out.force_estimate);
        out.exact = true;
    }
    if (injector_) injector_->apply(out);
    return out;
}

OracleOutput Oracle::evaluate_exact(std::span<const double> theta) const {
    require_finite(theta, target_->dim());
    OracleOutput out;
    out.potential_estimate = target_->potential(theta);
    out.force_estimate.resize(target_->dim());
    target_->force(theta, out.force_estimate);
    out.exact = true;
    return out;
}

}  // namespace tact
