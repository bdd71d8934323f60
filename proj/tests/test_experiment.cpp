#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "tact/config.hpp"
#include "tact/errors.hpp"
#include "tact/experiment.hpp"

using namespace tact;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "tact_tests" / name;
    fs::remove_all(dir);
    return dir;
}

ExperimentSpec small_spec(const std::string& out) {
    ExperimentSpec spec = parse_config_text(
        "[sampler]\n"
        "eta_theta = 0.01\n"
        "eta_xi = 0.0004\n"
        "steps_per_unit = 10\n"
        "bias_bins = 50\n"
        "[run]\n"
        "n_steps = 20000\n"
        "n_chains = 2\n"
        "trace_stride = 50\n"
        "seed = 11\n"
        "[diagnostics]\n"
        "ess_max_lag = 200\n"
        "histogram_bins = 60\n"
        "histogram_min = -8\n"
        "histogram_max = 10\n");
    spec.run.output_dir = out;
    return spec;
}

}  // namespace

TEST_CASE("make_target: all kinds construct and validate") {
    ModelSection mixture;  // defaults are the three-mode target
    CHECK(make_target(mixture)->dim() == 1);

    ModelSection conjugate;
    conjugate.kind = "conjugate_gaussian";
    conjugate.n_observations = 20;
    const auto c = make_target(conjugate);
    CHECK(c->dataset_size() == 20);

    ModelSection logistic;
    logistic.kind = "logistic_regression";
    logistic.n_observations = 30;
    const auto l = make_target(logistic);
    CHECK(l->dim() == 3);  // two features plus bias
    CHECK(l->dataset_size() == 30);

    ModelSection bad;
    bad.weights = {0.5};
    CHECK_THROWS_AS(make_target(bad), InvalidInput);
}

TEST_CASE("run_experiment: writes the full artifact set") {
    const fs::path dir = fresh_dir("basic");
    const RunManifest manifest = run_experiment(small_spec(dir.string()));
    CHECK(manifest.ok());
    CHECK(fs::exists(dir / "chain_0_samples.csv"));
    CHECK(fs::exists(dir / "chain_1_samples.csv"));
    CHECK(fs::exists(dir / "chain_0_trace.csv"));
    CHECK(fs::exists(dir / "bias_table.csv"));
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(fs::exists(dir / "manifest.txt"));
    CHECK(manifest.chain_seeds.size() == 2);
    CHECK(manifest.chain_seeds[0] != manifest.chain_seeds[1]);
    // Distinct seeds produce distinct chains.
    CHECK(slurp(dir / "chain_0_samples.csv") != slurp(dir / "chain_1_samples.csv"));
    CHECK(manifest.report.find("n_samples") != nullptr);
    CHECK(manifest.report.find("tv_to_analytic") != nullptr);
    CHECK(fs::exists(dir / "histogram.csv"));
    CHECK(fs::exists(dir / "acf.csv"));
}

TEST_CASE("run_experiment: rerunning a manifest reproduces every CSV bit for "
          "bit") {
    const fs::path dir_a = fresh_dir("repro_a");
    const fs::path dir_b = fresh_dir("repro_b");
    run_experiment(small_spec(dir_a.string()));

    // Rerun from the manifest itself, only redirecting the output.
    const ExperimentSpec replay = parse_config_file(
        (dir_a / "manifest.txt").string(), {"--run.output_dir=" + dir_b.string()});
    run_experiment(replay);

    for (const char* name : {"chain_0_samples.csv", "chain_1_samples.csv",
                             "chain_0_trace.csv", "chain_1_trace.csv", "bias_table.csv",
                             "report.csv", "histogram.csv", "acf.csv"}) {
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }
}

TEST_CASE("run_experiment: chain results are independent of the worker count") {
    const fs::path dir_a = fresh_dir("jobs1");
    const fs::path dir_b = fresh_dir("jobs4");
    ExperimentSpec spec = small_spec(dir_a.string());
    spec.run.jobs = 1;
    run_experiment(spec);
    spec.run.output_dir = dir_b.string();
    spec.run.jobs = 4;
    run_experiment(spec);
    CHECK(slurp(dir_a / "chain_0_samples.csv") == slurp(dir_b / "chain_0_samples.csv"));
    CHECK(slurp(dir_a / "chain_1_samples.csv") == slurp(dir_b / "chain_1_samples.csv"));
}

TEST_CASE("run_experiment: divergence is recorded and mapped to exit code 3") {
    const fs::path dir = fresh_dir("diverge");
    ExperimentSpec spec = small_spec(dir.string());
    spec.sampler.eta_theta = 1e9;
    spec.run.n_steps = 50000;
    const RunManifest manifest = run_experiment(spec);
    CHECK_FALSE(manifest.ok());
    CHECK(manifest.exit_code() == kExitDivergence);
    CHECK(fs::exists(dir / "manifest.txt"));
    CHECK(slurp(dir / "manifest.txt").find("diverged") != std::string::npos);
}

TEST_CASE("run_experiment: gate escalates threshold failures to exit code 4") {
    const fs::path dir = fresh_dir("gate");
    ExperimentSpec spec = small_spec(dir.string());
    spec.run.n_steps = 5000;  // far too short to hit the default TV threshold
    spec.diagnostics.gate = true;
    spec.diagnostics.tv_threshold = 1e-6;
    const RunManifest manifest = run_experiment(spec);
    CHECK(manifest.ok());
    CHECK(manifest.exit_code() == kExitThresholdFailure);
}

TEST_CASE("diagnose: recomputes an identical report from the stored CSVs") {
    const fs::path dir = fresh_dir("diagnose");
    run_experiment(small_spec(dir.string()));
    const std::string original = slurp(dir / "report.csv");
    const DiagnosticsReport recomputed = diagnose_directory(dir.string());
    CHECK(slurp(dir / "report.csv") == original);
    CHECK_FALSE(recomputed.rows.empty());
    CHECK_THROWS_AS(diagnose_directory((dir / "nope").string()), InvalidInput);
}

TEST_CASE("ablate: three variants with a comparison report") {
    const fs::path dir = fresh_dir("ablate");
    ExperimentSpec spec = small_spec(dir.string());
    spec.run.n_chains = 1;
    spec.run.n_steps = 10000;
    const RunManifest manifest = run_ablation_matrix(spec);
    CHECK(fs::exists(dir / "full" / "chain_0_samples.csv"));
    CHECK(fs::exists(dir / "no_thermostat" / "manifest.txt"));
    CHECK(fs::exists(dir / "no_tempering" / "report.csv"));
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(manifest.report.find("tv_full") != nullptr);
    CHECK(manifest.report.find("far_basin_mass_no_tempering") != nullptr);
}

TEST_CASE("tune_baseline: picks the known-good point, singleton grids, "
          "all-diverging grids") {
    ExperimentSpec spec = parse_config_text(
        "[model]\n"
        "weights = 1\n"
        "means = 0\n"
        "variances = 1\n"
        "[run]\n"
        "seed = 3\n"
        "[tuning]\n"
        "tune_steps = 40000\n");

    BaselineConfig good;
    good.kind = BaselineKind::sgld;
    good.step_size = 0.01;
    BaselineConfig terrible;
    terrible.kind = BaselineKind::sgld;
    terrible.step_size = 40.0;  // grossly overstepped: diverges or near-flat junk
    const BaselineConfig best = tune_baseline(spec, {terrible, good});
    CHECK(best.step_size == 0.01);

    const BaselineConfig only = tune_baseline(spec, {good});
    CHECK(only.step_size == 0.01);

    BaselineConfig nan_maker;
    nan_maker.kind = BaselineKind::sghmc;
    nan_maker.step_size = 1e9;
    CHECK_THROWS_WITH_AS(tune_baseline(spec, {nan_maker}), doctest::Contains("diverged"),
                         InvalidInput);
    CHECK_THROWS_AS(tune_baseline(spec, {}), InvalidInput);
}

TEST_CASE("compare: tunes each baseline and writes per-method runs") {
    const fs::path dir = fresh_dir("compare");
    ExperimentSpec spec = parse_config_text(
        "[model]\n"
        "weights = 1\n"
        "means = 0\n"
        "variances = 1\n"
        "[sampler]\n"
        "eta_theta = 0.01\n"
        "eta_xi = 0.0004\n"
        "steps_per_unit = 10\n"
        "bias_bins = 50\n"
        "[run]\n"
        "n_steps = 30000\n"
        "seed = 9\n"
        "[tuning]\n"
        "step_sizes = 0.003, 0.01\n"
        "frictions = 0.1\n"
        "tune_steps = 10000\n");
    spec.run.output_dir = dir.string();
    const RunManifest manifest = run_comparison(spec);
    CHECK(manifest.ok());
    for (const char* method : {"tact", "sgld", "sghmc", "sgnht"})
        CHECK(fs::exists(dir / method / "chain_0_samples.csv"));
    CHECK(manifest.report.find("tv_tact") != nullptr);
    CHECK(manifest.report.find("tuned_step_sghmc") != nullptr);
    CHECK(fs::exists(dir / "report.csv"));
}

TEST_CASE("tuning_grid: sgld varies step only, sghmc is the full product") {
    const ExperimentSpec spec = parse_config_text(
        "[tuning]\nstep_sizes = 0.001, 0.01\nfrictions = 0.1, 1.0\n");
    CHECK(tuning_grid(spec, BaselineKind::sgld).size() == 2);
    CHECK(tuning_grid(spec, BaselineKind::sghmc).size() == 4);
    const auto grid = tuning_grid(spec, BaselineKind::sgnht);
    REQUIRE(grid.size() == 4);
    CHECK(grid[0].step_size == 0.001);
    CHECK(grid[0].friction_or_noise_level == 0.1);
    CHECK(grid[3].step_size == 0.01);
    CHECK(grid[3].friction_or_noise_level == 1.0);
}
