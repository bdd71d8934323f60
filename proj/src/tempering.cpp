#include "tact/tempering.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "tact/errors.hpp"

namespace tact {

void TemperingProfile::validate() const {
    if (xi0 <= 0.0) throw InvalidInput("xi0 must be positive");
    if (xi1 <= xi0) throw InvalidInput("xi1 must exceed xi0");
    if (n < 2) throw InvalidInput("coupling exponent n must be >= 2");
    if (well_halfwidth <= xi0) throw InvalidInput("W0 must exceed xi0");
    if (temperature <= 0.0) throw InvalidInput("temperature must be positive");
    if (plateau_efficiency(*this) > 0.25)
        std::cerr << "note: plateau efficiency " << plateau_efficiency(*this)
                  << " exceeds the recommended 0.25\n";
}

double coupling(const TemperingProfile& profile, double xi) {
    const double a = std::abs(xi);
    if (a <= profile.xi0) return 1.0;
    const double t = (a - profile.xi0) / (profile.xi1 - profile.xi0);
    return 1.0 / (1.0 + std::pow(t, profile.n));
}

double coupling_derivative(const TemperingProfile& profile, double xi) {
    const double a = std::abs(xi);
    if (a <= profile.xi0) return 0.0;
    const double inv_scale = 1.0 / (profile.xi1 - profile.xi0);
    const double t = (a - profile.xi0) * inv_scale;
    const double tn = std::pow(t, profile.n);
    const double denom = 1.0 + tn;
    // d lambda / d|xi| = -n t^(n-1) / (scale (1+t^n)^2); odd in xi.
    const double d = -static_cast<double>(profile.n) * std::pow(t, profile.n - 1) * inv_scale /
                     (denom * denom);
    return xi > 0.0 ? d : -d;
}

double effective_temperature(const TemperingProfile& profile, double xi) {
    return profile.temperature / coupling(profile, xi);
}

bool on_plateau(const TemperingProfile& profile, double xi) {
    return std::abs(xi) <= profile.xi0;
}

double plateau_efficiency(const TemperingProfile& profile) {
    return profile.xi0 / profile.well_halfwidth;
}

std::pair<double, double> reflect(const TemperingProfile& profile, double xi, double r_xi) {
    const double w = profile.well_halfwidth;
    if (std::abs(xi) <= w) return {xi, r_xi};
    const double r_new = -r_xi;
    const double xi_new = xi + r_new;
    if (std::abs(xi_new) > w)
        throw StepTooLargeError("xi still outside the well after one reflection; "
                                "eta_xi is too large for this profile");
    return {xi_new, r_new};
}

std::string to_string(BiasMode mode) {
    switch (mode) {
        case BiasMode::abf_paper: return "abf_paper";
        case BiasMode::abf_per_bin: return "abf_per_bin";
        case BiasMode::metadynamics: return "metadynamics";
        case BiasMode::none: return "none";
    }
    return "none";
}

BiasMode bias_mode_from_string(const std::string& name) {
    if (name == "abf_paper") return BiasMode::abf_paper;
    if (name == "abf_per_bin") return BiasMode::abf_per_bin;
    if (name == "metadynamics") return BiasMode::metadynamics;
    if (name == "none") return BiasMode::none;
    throw InvalidInput("unknown bias mode '" + name + "'");
}

BiasTable::BiasTable(std::size_t bin_count, double well_halfwidth, BiasMode mode)
    : well_halfwidth_(well_halfwidth), mode_(mode) {
    if (bin_count == 0) throw InvalidInput("bias table needs at least one bin");
    if (well_halfwidth <= 0.0) throw InvalidInput("well half-width must be positive");
    bin_width_ = 2.0 * well_halfwidth_ / static_cast<double>(bin_count);
    values_.assign(bin_count, 0.0);
    visit_counts_.assign(bin_count, 0);
}

double BiasTable::bin_center(std::size_t j) const {
    return -well_halfwidth_ + (static_cast<double>(j) + 0.5) * bin_width_;
}

std::size_t BiasTable::bin_index(double xi) const {
    if (std::abs(xi) > well_halfwidth_)
        throw InvalidInput("xi outside the well in bias-table indexing");
    const double offset = (xi + well_halfwidth_) / bin_width_;
    auto j = static_cast<std::size_t>(offset);
    if (j >= values_.size()) j = values_.size() - 1;  // xi == +W0 joins the last bin
    return j;
}

double BiasTable::abf_lookup(double xi) const { return values_[bin_index(xi)]; }

void BiasTable::abf_update(double xi, double delta_lambda, double potential_estimate,
                           std::size_t global_step) {
    if (global_step < 1) throw InvalidInput("global step must be >= 1");
    const std::size_t j = bin_index(xi);
    ++visit_counts_[j];
    ++total_updates_;
    const double k = mode_ == BiasMode::abf_per_bin
                         ? static_cast<double>(visit_counts_[j])
                         : static_cast<double>(global_step);
    const double w = 1.0 / k;
    values_[j] = (1.0 - w) * values_[j] + w * delta_lambda * potential_estimate;
}

void BiasTable::metadynamics_update(double xi, double deposit_height) {
    if (deposit_height <= 0.0) throw InvalidInput("deposit height h_A must be positive");
    const std::size_t j = bin_index(xi);
    values_[j] += deposit_height;
    ++visit_counts_[j];
    ++total_updates_;
}

double BiasTable::metadynamics_force(double xi) const {
    const std::size_t j = bin_index(xi);
    const std::size_t last = values_.size() - 1;
    if (xi >= bin_center(j)) {
        const double neighbor = j == last ? values_[j] : values_[j + 1];
        return (values_[j] - neighbor) / bin_width_;
    }
    const double neighbor = j == 0 ? values_[j] : values_[j - 1];
    return (neighbor - values_[j]) / bin_width_;
}

double BiasTable::force_at(double xi) const {
    switch (mode_) {
        case BiasMode::abf_paper:
        case BiasMode::abf_per_bin: return abf_lookup(xi);
        case BiasMode::metadynamics: return metadynamics_force(xi);
        case BiasMode::none: return 0.0;
    }
    return 0.0;
}

void BiasTable::save_csv(std::ostream& out) const {
    out << "bin_center,value,visits\n";
    char buf[64];
    for (std::size_t j = 0; j < values_.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", bin_center(j));
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", values_[j]);
        out << buf << ',' << visit_counts_[j] << '\n';
    }
}

BiasTable BiasTable::load_csv(std::istream& in, BiasMode mode) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("bin_center,", 0) != 0)
        throw InvalidInput("bias table CSV: missing header");
    std::vector<double> centers;
    std::vector<double> values;
    std::vector<std::size_t> visits;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double center = 0.0, value = 0.0;
        std::size_t count = 0;
        if (!std::getline(row, field, ',')) throw InvalidInput("bias table CSV: bad row");
        center = std::stod(field);
        if (!std::getline(row, field, ',')) throw InvalidInput("bias table CSV: bad row");
        value = std::stod(field);
        if (!std::getline(row, field, ',')) throw InvalidInput("bias table CSV: bad row");
        count = static_cast<std::size_t>(std::stoull(field));
        centers.push_back(center);
        values.push_back(value);
        visits.push_back(count);
    }
    if (centers.size() < 2)
        throw InvalidInput("bias table CSV: need at least two bins to recover geometry");
    const std::size_t bins = centers.size();
    // Recover W0 from the grid: c0 = -W0 + width/2, width = 2 W0/J.
    const double width = centers[1] - centers[0];
    const double w0 = width * static_cast<double>(bins) / 2.0;
    BiasTable table(bins, w0, mode);
    table.values_ = std::move(values);
    table.visit_counts_ = std::move(visits);
    for (std::size_t c : table.visit_counts_) table.total_updates_ += c;
    return table;
}

}  // namespace tact
