#include "tact/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tact/errors.hpp"

namespace tact {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

void write_samples_csv(std::ostream& out, const SampleStore& store) {
    out << "step";
    for (std::size_t d = 0; d < store.dim; ++d) out << ",theta_" << d;
    out << '\n';
    for (std::size_t i = 0; i < store.size(); ++i) {
        out << store.collection_steps[i];
        const auto row = store.sample(i);
        for (double v : row) out << ',' << format_double(v);
        out << '\n';
    }
}

SampleStore read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("step", 0) != 0)
        throw InvalidInput("samples CSV: missing header");
    const auto header = split_csv_line(line);
    if (header.size() < 2) throw InvalidInput("samples CSV: header needs theta columns");
    SampleStore store;
    store.dim = header.size() - 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw InvalidInput("samples CSV: ragged row '" + line + "'");
        store.collection_steps.push_back(std::stoull(fields[0]));
        for (std::size_t d = 0; d < store.dim; ++d)
            store.samples.push_back(std::stod(fields[1 + d]));
    }
    return store;
}

void write_trace_csv(std::ostream& out, const SampleStore& store) {
    out << "step,xi,lambda,eff_temp,z_theta,z_xi,r_xi,U_est\n";
    for (const auto& t : store.traces) {
        out << t.step << ',' << format_double(t.xi) << ',' << format_double(t.lambda) << ','
            << format_double(t.eff_temp) << ',' << format_double(t.z_theta) << ','
            << format_double(t.z_xi) << ',' << format_double(t.r_xi) << ','
            << format_double(t.potential_estimate) << '\n';
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("step,xi,", 0) != 0)
        throw InvalidInput("trace CSV: missing header");
    std::vector<TraceRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 8) throw InvalidInput("trace CSV: ragged row '" + line + "'");
        TraceRecord rec;
        rec.step = std::stoull(fields[0]);
        rec.xi = std::stod(fields[1]);
        rec.lambda = std::stod(fields[2]);
        rec.eff_temp = std::stod(fields[3]);
        rec.z_theta = std::stod(fields[4]);
        rec.z_xi = std::stod(fields[5]);
        rec.r_xi = std::stod(fields[6]);
        rec.potential_estimate = std::stod(fields[7]);
        out.push_back(rec);
    }
    return out;
}

void write_histogram_csv(std::ostream& out, const HistogramSummary& hist) {
    out << "bin_lo,bin_hi,mass\n";
    for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b)
        out << format_double(hist.edges[b]) << ',' << format_double(hist.edges[b + 1]) << ','
            << format_double(hist.masses[b]) << '\n';
    out << "overflow,overflow," << format_double(hist.overflow_mass) << '\n';
}

void write_acf_csv(std::ostream& out, const AcfSummary& acf) {
    out << "lag,rho\n";
    for (std::size_t k = 0; k < acf.rho.size(); ++k)
        out << k << ',' << format_double(acf.rho[k]) << '\n';
}

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("dataset CSV: empty file");
    const auto header = split_csv_line(line);
    if (header.empty() || header[0].rfind("x0", 0) != 0)
        throw InvalidInput("dataset CSV: header must start with x0");
    const bool labeled = header.back() == "label";
    const std::size_t n_features = labeled ? header.size() - 1 : header.size();
    if (n_features == 0) throw InvalidInput("dataset CSV: no feature columns");
    Dataset data;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw InvalidInput("dataset CSV: ragged row '" + line + "'");
        std::vector<double> row(n_features);
        for (std::size_t j = 0; j < n_features; ++j) row[j] = std::stod(fields[j]);
        data.rows.push_back(std::move(row));
        if (labeled) {
            const int y = std::stoi(fields.back());
            if (y != 0 && y != 1) throw InvalidInput("dataset CSV: labels must be 0/1");
            data.labels.push_back(y);
        }
    }
    if (data.rows.empty()) throw InvalidInput("dataset CSV: no rows");
    return data;
}

Dataset load_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open dataset file '" + path + "'");
    return read_dataset_csv(in);
}

}  // namespace tact
