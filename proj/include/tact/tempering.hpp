// Continuous-tempering machinery: the coupling function lambda(xi), the
// reflecting well, and the bias that flattens xi's free-energy landscape
// (adaptive biasing force or metadynamics).
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tact {

// Parameters of the coupling function
//   1/lambda(xi) = 1                                   if |xi| <= xi0
//                  1 + ((|xi| - xi0)/(xi1 - xi0))^n    otherwise
// together with the hard-wall half-width W0 and the extended-system
// temperature T. n >= 2 is enforced so lambda' is continuous at |xi| = xi0.
struct TemperingProfile {
    double xi0 = 1.0 / 3.0;
    double xi1 = 1.0;
    int n = 3;
    double well_halfwidth = 5.0 / 3.0;  // W0
    double temperature = 1.0;           // T

    void validate() const;  // throws InvalidInput; emits a note to stderr when
                            // plateau efficiency exceeds 0.25
};

double coupling(const TemperingProfile& profile, double xi);
double coupling_derivative(const TemperingProfile& profile, double xi);

// Effective temperature T / lambda(xi).
double effective_temperature(const TemperingProfile& profile, double xi);

// True on the plateau |xi| <= xi0 (lambda == 1, lambda' == 0).
bool on_plateau(const TemperingProfile& profile, double xi);

// Fraction of the well occupied by the plateau, xi0 / W0.
double plateau_efficiency(const TemperingProfile& profile);

// Elastic bounce at the well walls: given the post-update xi and the momentum
// r_xi that produced it, returns (xi, r_xi) unchanged if |xi| <= W0 and the
// reversed-step pair otherwise. Throws StepTooLargeError if one reflection is
// not enough.
std::pair<double, double> reflect(const TemperingProfile& profile, double xi, double r_xi);

enum class BiasMode { abf_paper, abf_per_bin, metadynamics, none };

std::string to_string(BiasMode mode);
BiasMode bias_mode_from_string(const std::string& name);

// J uniform bins tiling [-W0, W0]. In ABF modes the bins hold running
// estimates of the mean generalized force on xi; in metadynamics mode they
// hold the accumulated repulsive potential. Bins are half-open [a, b) with
// the last bin closed, so a xi exactly on an interior edge belongs to the
// bin on its right.
class BiasTable {
public:
    BiasTable(std::size_t bin_count, double well_halfwidth, BiasMode mode);

    std::size_t bin_count() const { return values_.size(); }
    double bin_width() const { return bin_width_; }
    BiasMode mode() const { return mode_; }
    double bin_center(std::size_t j) const;
    std::size_t bin_index(double xi) const;  // throws InvalidInput when |xi| > W0

    const std::vector<double>& values() const { return values_; }
    const std::vector<std::size_t>& visit_counts() const { return visit_counts_; }
    std::size_t total_updates() const { return total_updates_; }

    // ABF lookup: stored estimate for the containing bin (0 if never visited).
    double abf_lookup(double xi) const;
    // ABF deposit of delta_lambda * U_tilde. abf_paper weights by the global
    // step k; abf_per_bin weights by the bin's own visit count.
    void abf_update(double xi, double delta_lambda, double potential_estimate,
                    std::size_t global_step);

    // Metadynamics deposit of height h_A into the containing bin.
    void metadynamics_update(double xi, double deposit_height);
    // One-sided finite-difference force of the accumulated potential;
    // a missing neighbor at the well edges counts as equal to the edge bin.
    double metadynamics_force(double xi) const;

    // Biasing force to add (scaled by eta_xi) to the r_xi update.
    double force_at(double xi) const;

    // CSV round-trip: "bin_center,value,visits" rows, enabling warm starts.
    void save_csv(std::ostream& out) const;
    static BiasTable load_csv(std::istream& in, BiasMode mode);

private:
    double well_halfwidth_;
    double bin_width_;
    BiasMode mode_;
    std::vector<double> values_;
    std::vector<std::size_t> visit_counts_;
    std::size_t total_updates_ = 0;
};

}  // namespace tact
