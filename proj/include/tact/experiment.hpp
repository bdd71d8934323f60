// Experiment orchestration: building targets and samplers from a spec,
// running chains on a worker pool, writing the artifact files
// (chain_<i>_samples.csv, chain_<i>_trace.csv, bias_table.csv, report.csv,
// manifest.txt), the ablation matrix, baseline grid tuning and the
// recompute-from-disk diagnose path.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tact/baselines.hpp"
#include "tact/config.hpp"
#include "tact/diagnostics.hpp"
#include "tact/dynamics.hpp"
#include "tact/models.hpp"

namespace tact {

inline constexpr const char* kVersionString = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitThresholdFailure = 4;

// Spec -> runtime objects. Synthetic datasets are drawn from model.data_seed,
// so every chain of a run shares one dataset.
std::shared_ptr<const Target> make_target(const ModelSection& model);
TemperingProfile make_profile(const SamplerSection& sampler);
SamplerConfig make_sampler_config(const ExperimentSpec& spec, std::uint64_t chain_seed);
TactSampler::OracleSpec make_oracle_spec(const ModelSection& model);
BaselineConfig make_baseline_config(const ExperimentSpec& spec, BaselineKind kind,
                                    std::uint64_t chain_seed);

// Normalized density of theta_0's marginal, when the target has one.
std::optional<std::function<double(double)>> marginal_density(const Target& target);

struct ReportRow {
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    bool has_threshold = false;
    bool pass = true;
};

struct DiagnosticsReport {
    std::vector<ReportRow> rows;
    // Series behind the scalar metrics, written out for external plotting.
    std::optional<HistogramSummary> theta_histogram;
    std::optional<AcfSummary> theta_acf;
    bool all_pass() const;
    const ReportRow* find(const std::string& metric) const;
};

struct RunManifest {
    ExperimentSpec spec;  // resolved
    std::vector<std::uint64_t> chain_seeds;
    std::vector<std::string> files;
    double wall_clock_seconds = 0.0;
    std::string version = kVersionString;
    std::string kernel_isa;
    std::string status = "ok";  // or "diverged: <message>"
    std::string output_dir;
    DiagnosticsReport report;

    bool ok() const { return status == "ok"; }
    int exit_code() const;
};

// Run one experiment spec end to end; the manifest is written last.
RunManifest run_experiment(const ExperimentSpec& spec);

// Fig-1a style matrix: full TACT plus the two ablations under subdirectories
// full/, no_thermostat/, no_tempering/, with a comparison report on top.
RunManifest run_ablation_matrix(const ExperimentSpec& spec);

// Grid tuning of one baseline: runs every candidate at the tuning budget and
// returns the one minimizing TV distance to the analytic marginal (ties break
// to the earliest grid point). Throws InvalidInput when every point diverges.
std::vector<BaselineConfig> tuning_grid(const ExperimentSpec& spec, BaselineKind kind);
BaselineConfig tune_baseline(const ExperimentSpec& spec,
                             const std::vector<BaselineConfig>& grid);

// TACT vs tuned baselines under tact/, sgld/, sghmc/, sgnht/.
RunManifest run_comparison(const ExperimentSpec& spec);

// Recompute report.csv of an existing run directory from its CSVs + manifest.
DiagnosticsReport diagnose_directory(const std::string& dir);

void write_report_csv(std::ostream& out, const DiagnosticsReport& report);
DiagnosticsReport compute_report(const ExperimentSpec& spec, const Target& target,
                                 const std::vector<SampleStore>& stores);

}  // namespace tact
