// Quantitative checks behind the sampler's claims: histograms, total
// variation distance, autocorrelation / effective sample size, thermostat
// marginal tests, effective-temperature traces and xi-flatness. Everything
// here is a pure function of its inputs.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tact/tempering.hpp"

namespace tact {

struct HistogramSummary {
    std::vector<double> edges;   // bins + 1, strictly increasing
    std::vector<double> masses;  // normalized in-range masses
    double overflow_mass = 0.0;  // fraction of samples outside [edges.front(), edges.back()]
    std::size_t count = 0;
};

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);

// Normalized histogram; samples outside the edge range land in the overflow
// bucket. Bins are half-open [e_i, e_{i+1}) with the last bin closed.
HistogramSummary histogram(std::span<const double> samples, std::span<const double> edges);

// 0.5 * L1 between two mass vectors of equal length.
double tv_mass(std::span<const double> p, std::span<const double> q);

// TV between a histogram and an analytic density, with the density's bin
// masses computed by midpoint quadrature (subpoints per bin >= 10) and the
// out-of-range mass compared against the histogram's overflow bucket.
double tv_distance(const HistogramSummary& hist,
                   const std::function<double(double)>& density, int subpoints = 10);

struct AcfSummary {
    std::vector<double> rho;        // lags 0..max_lag, rho[0] == 1
    std::size_t truncation_lag = 0; // last lag included in the ESS sum
    double ess = 0.0;
    std::size_t n = 0;
};

// Biased estimator rho(k) = c_k / c_0 about the sample mean, with the ESS sum
// truncated at the first lag k where rho(k) + rho(k+1) < 0.
AcfSummary autocorrelation(std::span<const double> samples, std::size_t max_lag);

// n / (1 + 2 sum rho(k)) using the summary's truncation; clamped to (0, n].
double effective_sample_size(const AcfSummary& acf, std::size_t n);

struct KsReport {
    double statistic = 0.0;
    double critical_value = 0.0;
    bool pass = false;
    std::size_t n = 0;
};

// One-sample Kolmogorov-Smirnov against N(mean, stddev^2), asymptotic
// critical value sqrt(-ln(alpha/2)/2)/sqrt(n). No correction is applied for
// parameters fitted from the same data; reports note this.
KsReport ks_test_gaussian(std::span<const double> values, double mean, double stddev,
                          double alpha = 0.01);

struct ThermostatTestReport {
    double mean = 0.0;
    double variance = 0.0;
    double expected_mean = 0.0;
    double mean_relative_error = 0.0;
    bool mean_pass = false;
    KsReport gaussian;
    bool gaussian_pass = false;
    bool pass = false;
    std::size_t thinning_stride = 1;
    std::size_t effective_points = 0;
};

// Thins the trace by the ceiling of its integrated autocorrelation time,
// fits a Gaussian, KS-tests it at alpha, and compares the mean against
// expected_mean at the stated relative tolerance. Throws
// InsufficientDataError below 100 effective points.
ThermostatTestReport thermostat_marginal_test(std::span<const double> trace,
                                              double expected_mean, bool expect_gaussian,
                                              double alpha = 0.01,
                                              double mean_tolerance = 0.10);

struct TemperatureTraceSummary {
    std::vector<double> effective_temperature;  // T / lambda(xi_k)
    double unity_fraction = 0.0;                // fraction of steps with lambda == 1
};

TemperatureTraceSummary temperature_trace(std::span<const double> xi_trace,
                                          const TemperingProfile& profile);

// TV distance of the xi histogram from the uniform density on [-W0, W0].
double xi_flatness(std::span<const double> xi_trace, const TemperingProfile& profile,
                   std::size_t bins = 50);

// Sample moments (kernel-backed).
double mean_of(std::span<const double> values);
double variance_of(std::span<const double> values);  // denominator n

// Fraction of samples falling in each basin, with basin boundaries at the
// midpoints between consecutive sorted mode locations.
std::vector<double> mode_masses(std::span<const double> samples,
                                std::span<const double> modes);

}  // namespace tact
