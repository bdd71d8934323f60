#include "tact/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "tact/errors.hpp"
#include "tact/kernels.hpp"

namespace tact {

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    if (!(hi > lo)) throw InvalidInput("histogram range must have hi > lo");
    if (bins == 0) throw InvalidInput("histogram needs at least one bin");
    std::vector<double> edges(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) edges[i] = lo + width * static_cast<double>(i);
    edges.back() = hi;
    return edges;
}

HistogramSummary histogram(std::span<const double> samples, std::span<const double> edges) {
    if (edges.size() < 2) throw InvalidInput("histogram needs at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw InvalidInput("histogram edges must be strictly increasing");
    HistogramSummary out;
    out.edges.assign(edges.begin(), edges.end());
    out.masses.assign(edges.size() - 1, 0.0);
    out.count = samples.size();
    if (samples.empty()) return out;

    std::size_t overflow = 0;
    const double lo = edges.front();
    const double hi = edges.back();
    for (double x : samples) {
        if (x < lo || x > hi) {
            ++overflow;
            continue;
        }
        // upper_bound gives the first edge > x; the last bin is closed.
        auto it = std::upper_bound(out.edges.begin(), out.edges.end(), x);
        std::size_t bin = static_cast<std::size_t>(it - out.edges.begin());
        bin = bin == 0 ? 0 : bin - 1;
        if (bin >= out.masses.size()) bin = out.masses.size() - 1;
        out.masses[bin] += 1.0;
    }
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (double& m : out.masses) m *= inv_n;
    out.overflow_mass = static_cast<double>(overflow) * inv_n;
    return out;
}

double tv_mass(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw InvalidInput("tv_mass needs equal-length mass vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return 0.5 * acc;
}

double tv_distance(const HistogramSummary& hist,
                   const std::function<double(double)>& density, int subpoints) {
    if (subpoints < 10) subpoints = 10;
    double acc = 0.0;
    double density_in_range = 0.0;
    for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b) {
        const double lo = hist.edges[b];
        const double hi = hist.edges[b + 1];
        const double h = (hi - lo) / subpoints;
        double q = 0.0;
        for (int s = 0; s < subpoints; ++s) q += density(lo + (s + 0.5) * h);
        q *= h;
        density_in_range += q;
        acc += std::abs(hist.masses[b] - q);
    }
    const double density_overflow = std::max(0.0, 1.0 - density_in_range);
    acc += std::abs(hist.overflow_mass - density_overflow);
    return 0.5 * acc;
}

AcfSummary autocorrelation(std::span<const double> samples, std::size_t max_lag) {
    const std::size_t n = samples.size();
    if (max_lag < 1) throw InvalidInput("max_lag must be >= 1");
    if (n <= max_lag) throw InvalidInput("need more samples than max_lag");
    const double mean = kernels::sum(samples.data(), n) / static_cast<double>(n);
    const double c0 = kernels::autocovariance(samples.data(), n, mean, 0);
    if (c0 == 0.0)
        throw UndefinedAutocorrelationError("autocorrelation of a constant sequence");
    AcfSummary out;
    out.n = n;
    out.rho.resize(max_lag + 1);
    out.rho[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k)
        out.rho[k] = kernels::autocovariance(samples.data(), n, mean, k) / c0;
    // Truncate at the first lag where rho(k) + rho(k+1) < 0.
    out.truncation_lag = max_lag;
    for (std::size_t k = 1; k + 1 <= max_lag; ++k) {
        if (out.rho[k] + out.rho[k + 1] < 0.0) {
            out.truncation_lag = k - 1;
            break;
        }
    }
    out.ess = effective_sample_size(out, n);
    return out;
}

double effective_sample_size(const AcfSummary& acf, std::size_t n) {
    double tail = 0.0;
    for (std::size_t k = 1; k <= acf.truncation_lag && k < acf.rho.size(); ++k)
        tail += acf.rho[k];
    const double denom = 1.0 + 2.0 * tail;
    const double n_d = static_cast<double>(n);
    if (denom < 1.0) return n_d;  // anticorrelated chains are clamped at n
    return n_d / denom;
}

namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

KsReport ks_test_gaussian(std::span<const double> values, double mean, double stddev,
                          double alpha) {
    if (values.size() < 2) throw InsufficientDataError("KS test needs at least two points");
    if (!(stddev > 0.0)) throw InvalidInput("KS test needs a positive stddev");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must be in (0, 1)");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = standard_normal_cdf((sorted[i] - mean) / stddev);
        d = std::max(d, std::max(cdf - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - cdf));
    }
    KsReport report;
    report.n = sorted.size();
    report.statistic = d;
    report.critical_value = std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(n);
    report.pass = d < report.critical_value;
    return report;
}

ThermostatTestReport thermostat_marginal_test(std::span<const double> trace,
                                              double expected_mean, bool expect_gaussian,
                                              double alpha, double mean_tolerance) {
    if (trace.size() < 2) throw InsufficientDataError("thermostat trace too short");

    // Thinning stride = ceil(integrated autocorrelation time) of the raw trace.
    std::size_t stride = 1;
    const std::size_t max_lag = std::min<std::size_t>(trace.size() / 2, 2000);
    if (max_lag >= 1 && trace.size() > max_lag) {
        try {
            const AcfSummary acf = autocorrelation(trace, max_lag);
            double tail = 0.0;
            for (std::size_t k = 1; k <= acf.truncation_lag; ++k) tail += acf.rho[k];
            const double tau = std::max(1.0, 1.0 + 2.0 * tail);
            stride = static_cast<std::size_t>(std::ceil(tau));
        } catch (const UndefinedAutocorrelationError&) {
            stride = 1;  // constant trace fails later on variance grounds
        }
    }

    std::vector<double> thinned;
    thinned.reserve(trace.size() / stride + 1);
    for (std::size_t i = 0; i < trace.size(); i += stride) thinned.push_back(trace[i]);
    if (thinned.size() < 100)
        throw InsufficientDataError("fewer than 100 effective thermostat points (" +
                                    std::to_string(thinned.size()) + ")");

    ThermostatTestReport report;
    report.thinning_stride = stride;
    report.effective_points = thinned.size();
    report.mean = mean_of(thinned);
    report.variance = variance_of(thinned);
    report.expected_mean = expected_mean;
    const double scale =
        std::abs(expected_mean) > 1e-12 ? std::abs(expected_mean) : std::sqrt(report.variance);
    report.mean_relative_error = std::abs(report.mean - expected_mean) / scale;
    report.mean_pass = report.mean_relative_error <= mean_tolerance;
    report.gaussian =
        ks_test_gaussian(thinned, report.mean, std::sqrt(report.variance), alpha);
    report.gaussian_pass = report.gaussian.pass;
    report.pass = expect_gaussian ? (report.gaussian_pass && report.mean_pass)
                                  : !report.gaussian_pass;
    return report;
}

TemperatureTraceSummary temperature_trace(std::span<const double> xi_trace,
                                          const TemperingProfile& profile) {
    TemperatureTraceSummary out;
    out.effective_temperature.resize(xi_trace.size());
    std::size_t at_unity = 0;
    for (std::size_t i = 0; i < xi_trace.size(); ++i) {
        const double lambda = coupling(profile, xi_trace[i]);
        out.effective_temperature[i] = profile.temperature / lambda;
        if (lambda == 1.0) ++at_unity;
    }
    out.unity_fraction = xi_trace.empty()
                             ? 0.0
                             : static_cast<double>(at_unity) /
                                   static_cast<double>(xi_trace.size());
    return out;
}

double xi_flatness(std::span<const double> xi_trace, const TemperingProfile& profile,
                   std::size_t bins) {
    if (xi_trace.empty()) throw InvalidInput("xi_flatness needs a nonempty trace");
    const auto edges =
        uniform_edges(-profile.well_halfwidth, profile.well_halfwidth, bins);
    const HistogramSummary hist = histogram(xi_trace, edges);
    const double uniform_mass = 1.0 / static_cast<double>(bins);
    double acc = 0.0;
    for (double m : hist.masses) acc += std::abs(m - uniform_mass);
    acc += hist.overflow_mass;  // uniform density has no out-of-well mass
    return 0.5 * acc;
}

double mean_of(std::span<const double> values) {
    if (values.empty()) throw InvalidInput("mean of an empty range");
    return kernels::sum(values.data(), values.size()) / static_cast<double>(values.size());
}

double variance_of(std::span<const double> values) {
    if (values.empty()) throw InvalidInput("variance of an empty range");
    const double m = mean_of(values);
    return kernels::autocovariance(values.data(), values.size(), m, 0) /
           static_cast<double>(values.size());
}

std::vector<double> mode_masses(std::span<const double> samples,
                                std::span<const double> modes) {
    if (modes.empty()) throw InvalidInput("mode_masses needs at least one mode");
    std::vector<double> sorted_modes(modes.begin(), modes.end());
    std::sort(sorted_modes.begin(), sorted_modes.end());
    std::vector<double> boundaries;
    for (std::size_t i = 0; i + 1 < sorted_modes.size(); ++i)
        boundaries.push_back(0.5 * (sorted_modes[i] + sorted_modes[i + 1]));
    std::vector<double> counts(sorted_modes.size(), 0.0);
    for (double x : samples) {
        const std::size_t basin = static_cast<std::size_t>(
            std::upper_bound(boundaries.begin(), boundaries.end(), x) - boundaries.begin());
        counts[basin] += 1.0;
    }
    if (!samples.empty())
        for (double& c : counts) c /= static_cast<double>(samples.size());
    return counts;
}

}  // namespace tact
