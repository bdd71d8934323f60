// CSV reading/writing for samples, traces and datasets. Floats are written
// with 17 significant digits so files round-trip bit-exactly.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tact/diagnostics.hpp"
#include "tact/dynamics.hpp"

namespace tact {

std::string format_double(double value);  // %.17g

// Header: step,theta_0,...,theta_{D-1}
void write_samples_csv(std::ostream& out, const SampleStore& store);
SampleStore read_samples_csv(std::istream& in);

// Header: step,xi,lambda,eff_temp,z_theta,z_xi,r_xi,U_est
void write_trace_csv(std::ostream& out, const SampleStore& store);
std::vector<TraceRecord> read_trace_csv(std::istream& in);

// Plot-ready series: "bin_lo,bin_hi,mass" plus a trailing overflow row, and
// "lag,rho".
void write_histogram_csv(std::ostream& out, const HistogramSummary& hist);
void write_acf_csv(std::ostream& out, const AcfSummary& acf);

// Dataset files: one observation per row, header "x0,x1,...[,label]".
struct Dataset {
    std::vector<std::vector<double>> rows;  // feature/observation vectors
    std::vector<int> labels;                // empty when the file has no label column
    bool has_labels() const { return !labels.empty(); }
};

Dataset read_dataset_csv(std::istream& in);
Dataset load_dataset_file(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace tact
