#include "tact/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "tact/csv.hpp"
#include "tact/diagnostics.hpp"
#include "tact/errors.hpp"
#include "tact/kernels.hpp"

namespace fs = std::filesystem;

namespace tact {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

double normal_pdf(double x, double mean, double variance) {
    const double r = x - mean;
    return std::exp(-0.5 * r * r / variance - kHalfLog2Pi - 0.5 * std::log(variance));
}

std::vector<std::vector<double>> synthesize_conjugate_data(const ModelSection& model) {
    RngStream rng(derive_stream_seed(model.data_seed, 7));
    const std::size_t d = model.prior_mean.size();
    if (model.data_location.size() != d)
        throw InvalidInput("data_location dimension must match prior_mean");
    if (model.n_observations == 0)
        throw InvalidInput("conjugate model needs n_observations >= 1");
    const double sd = std::sqrt(model.observation_variance);
    std::vector<std::vector<double>> rows(model.n_observations, std::vector<double>(d));
    for (auto& row : rows)
        for (std::size_t j = 0; j < d; ++j)
            row[j] = model.data_location[j] + sd * rng.normal();
    return rows;
}

void synthesize_logistic_data(const ModelSection& model,
                              std::vector<std::vector<double>>& features,
                              std::vector<int>& labels) {
    RngStream rng(derive_stream_seed(model.data_seed, 8));
    if (model.true_theta.size() != model.n_features + 1)
        throw InvalidInput("true_theta must have n_features + 1 entries (weights then bias)");
    if (model.n_observations == 0)
        throw InvalidInput("logistic model needs n_observations >= 1");
    features.assign(model.n_observations, std::vector<double>(model.n_features));
    labels.assign(model.n_observations, 0);
    for (std::size_t i = 0; i < model.n_observations; ++i) {
        double z = model.true_theta.back();
        for (std::size_t j = 0; j < model.n_features; ++j) {
            features[i][j] = rng.normal();
            z += model.true_theta[j] * features[i][j];
        }
        const double p = 1.0 / (1.0 + std::exp(-z));
        labels[i] = rng.uniform() < p ? 1 : 0;
    }
}

}  // namespace

std::shared_ptr<const Target> make_target(const ModelSection& model) {
    if (model.kind == "gaussian_mixture") {
        if (model.weights.size() != model.means.size() ||
            model.weights.size() != model.variances.size())
            throw InvalidInput("weights, means and variances must have equal component counts");
        std::vector<GaussianMixtureTarget::Component> comps(model.weights.size());
        for (std::size_t c = 0; c < comps.size(); ++c)
            comps[c] = {model.weights[c], model.means[c], model.variances[c]};
        return std::make_shared<GaussianMixtureTarget>(std::move(comps));
    }
    if (model.kind == "conjugate_gaussian") {
        std::vector<std::vector<double>> rows;
        if (!model.dataset_file.empty()) {
            rows = load_dataset_file(model.dataset_file).rows;
        } else {
            rows = synthesize_conjugate_data(model);
        }
        return std::make_shared<ConjugateGaussianModel>(model.prior_mean, model.prior_variance,
                                                        model.observation_variance,
                                                        std::move(rows));
    }
    if (model.kind == "logistic_regression") {
        std::vector<std::vector<double>> features;
        std::vector<int> labels;
        if (!model.dataset_file.empty()) {
            Dataset data = load_dataset_file(model.dataset_file);
            if (!data.has_labels())
                throw InvalidInput("logistic_regression dataset file needs a label column");
            features = std::move(data.rows);
            labels = std::move(data.labels);
        } else {
            synthesize_logistic_data(model, features, labels);
        }
        return std::make_shared<LogisticRegressionModel>(std::move(features), std::move(labels),
                                                         model.prior_variance);
    }
    throw InvalidInput("unknown model kind '" + model.kind + "'");
}

TemperingProfile make_profile(const SamplerSection& sampler) {
    TemperingProfile profile;
    profile.xi0 = sampler.xi0;
    profile.xi1 = sampler.xi1;
    profile.n = static_cast<int>(sampler.coupling_exponent);
    profile.well_halfwidth = sampler.well_halfwidth;
    profile.temperature = sampler.temperature;
    return profile;
}

SamplerConfig make_sampler_config(const ExperimentSpec& spec, std::uint64_t chain_seed) {
    const auto& s = spec.sampler;
    SamplerConfig config;
    config.eta_theta = s.eta_theta;
    config.eta_xi = s.eta_xi;
    config.c_theta = s.c_theta;
    config.c_xi = s.c_xi;
    config.gamma_theta = s.gamma_theta;
    config.gamma_xi = s.gamma_xi;
    config.steps_per_unit = s.steps_per_unit;
    if (s.method == "ablation_no_thermostat") config.ablation = Ablation::no_thermostat;
    else if (s.method == "ablation_no_tempering") config.ablation = Ablation::no_tempering;
    else config.ablation = Ablation::full;
    config.bias_mode = bias_mode_from_string(s.bias_mode);
    config.bias_bins = s.bias_bins;
    config.metadynamics_height = s.metadynamics_height;
    config.resample_momenta = s.resample_momenta;
    config.seed = chain_seed;
    config.theta_init = spec.model.theta_init;
    return config;
}

TactSampler::OracleSpec make_oracle_spec(const ModelSection& model) {
    return {model.potential_noise_std, model.force_noise_std, model.batch_size};
}

BaselineConfig make_baseline_config(const ExperimentSpec& spec, BaselineKind kind,
                                    std::uint64_t chain_seed) {
    BaselineConfig config;
    config.kind = kind;
    config.step_size = spec.sampler.step_size;
    config.friction_or_noise_level = spec.sampler.friction;
    config.collection_stride = spec.sampler.steps_per_unit;
    config.seed = chain_seed;
    config.theta_init = spec.model.theta_init;
    return config;
}

std::optional<std::function<double(double)>> marginal_density(const Target& target) {
    if (const auto* mixture = dynamic_cast<const GaussianMixtureTarget*>(&target)) {
        const auto comps = mixture->components();
        return [comps](double x) {
            double acc = 0.0;
            for (const auto& c : comps) acc += c.weight * normal_pdf(x, c.mean[0], c.variance[0]);
            return acc;
        };
    }
    if (const auto* conjugate = dynamic_cast<const ConjugateGaussianModel*>(&target)) {
        const double mean = conjugate->posterior_mean()[0];
        const double var = conjugate->posterior_variance();
        return [mean, var](double x) { return normal_pdf(x, mean, var); };
    }
    return std::nullopt;
}

bool DiagnosticsReport::all_pass() const {
    for (const auto& row : rows)
        if (row.has_threshold && !row.pass) return false;
    return true;
}

const ReportRow* DiagnosticsReport::find(const std::string& metric) const {
    for (const auto& row : rows)
        if (row.metric == metric) return &row;
    return nullptr;
}

int RunManifest::exit_code() const {
    if (!ok()) return kExitDivergence;
    if (spec.diagnostics.gate && !report.all_pass()) return kExitThresholdFailure;
    return kExitOk;
}

void write_report_csv(std::ostream& out, const DiagnosticsReport& report) {
    out << "metric,value,threshold,pass\n";
    for (const auto& row : report.rows) {
        out << row.metric << ',' << format_double(row.value) << ',';
        if (row.has_threshold) out << format_double(row.threshold);
        else out << "nan";
        out << ',' << (row.pass ? 1 : 0) << '\n';
    }
}

DiagnosticsReport compute_report(const ExperimentSpec& spec, const Target& target,
                                 const std::vector<SampleStore>& stores) {
    const auto& diag = spec.diagnostics;
    DiagnosticsReport report;
    auto info = [&report](const std::string& metric, double value) {
        report.rows.push_back({metric, value, 0.0, false, true});
    };
    auto checked = [&report](const std::string& metric, double value, double threshold,
                             bool pass) {
        report.rows.push_back({metric, value, threshold, true, pass});
    };

    std::vector<double> theta0;
    for (const auto& store : stores)
        for (std::size_t i = 0; i < store.size(); ++i) theta0.push_back(store.sample(i)[0]);
    info("n_samples", static_cast<double>(theta0.size()));
    if (theta0.empty()) return report;

    info("sample_mean_0", mean_of(theta0));
    info("sample_variance_0", variance_of(theta0));

    if (const auto density = marginal_density(target)) {
        double lo = diag.histogram_min;
        double hi = diag.histogram_max;
        if (!(hi > lo)) {
            lo = *std::min_element(theta0.begin(), theta0.end());
            hi = *std::max_element(theta0.begin(), theta0.end());
            if (!(hi > lo)) hi = lo + 1.0;
        }
        auto hist = histogram(theta0, uniform_edges(lo, hi, diag.histogram_bins));
        const double tv = tv_distance(hist, *density);
        checked("tv_to_analytic", tv, diag.tv_threshold, tv <= diag.tv_threshold);
        report.theta_histogram = std::move(hist);
    }

    if (theta0.size() > diag.ess_max_lag + 1 && diag.ess_max_lag >= 1) {
        try {
            AcfSummary acf = autocorrelation(theta0, diag.ess_max_lag);
            checked("ess_theta0", acf.ess, diag.ess_min, acf.ess >= diag.ess_min);
            report.theta_acf = std::move(acf);
        } catch (const UndefinedAutocorrelationError&) {
            checked("ess_theta0", 0.0, diag.ess_min, false);
        }
    }

    // Trace-backed metrics: xi occupancy and thermostat means, post-burn-in.
    const bool tempering = spec.sampler.method == "tact" ||
                           spec.sampler.method == "ablation_no_thermostat";
    std::vector<double> xi_trace;
    std::vector<double> z_theta_trace;
    std::vector<double> z_xi_trace;
    for (const auto& store : stores)
        for (const auto& t : store.traces) {
            if (t.step <= spec.run.burn_in) continue;
            xi_trace.push_back(t.xi);
            z_theta_trace.push_back(t.z_theta);
            z_xi_trace.push_back(t.z_xi);
        }
    if (tempering && !xi_trace.empty()) {
        const TemperingProfile profile = make_profile(spec.sampler);
        const auto temp = temperature_trace(xi_trace, profile);
        checked("unity_fraction_min", temp.unity_fraction, diag.unity_fraction_min,
                temp.unity_fraction >= diag.unity_fraction_min);
        checked("unity_fraction_max", temp.unity_fraction, diag.unity_fraction_max,
                temp.unity_fraction <= diag.unity_fraction_max);
        const double flatness = xi_flatness(xi_trace, profile, diag.xi_bins);
        checked("xi_flatness_tv", flatness, diag.xi_flatness_threshold,
                flatness <= diag.xi_flatness_threshold);
    }
    if (!z_theta_trace.empty()) {
        info("z_theta_mean", mean_of(z_theta_trace));
        info("z_xi_mean", mean_of(z_xi_trace));
    }
    return report;
}

namespace {

struct ChainOutcome {
    SampleStore store;
    std::optional<BiasTable> bias;
    std::string error;  // empty = ok
};

ChainOutcome run_one_chain(const ExperimentSpec& spec, std::shared_ptr<const Target> target,
                           std::uint64_t chain_seed) {
    ChainOutcome outcome;
    try {
        const auto& method = spec.sampler.method;
        if (method == "sgld" || method == "sghmc" || method == "sgnht") {
            BaselineSampler sampler(
                make_baseline_config(spec, baseline_kind_from_string(method), chain_seed),
                target, make_oracle_spec(spec.model));
            outcome.store = sampler.run(spec.run.n_steps, spec.run.burn_in,
                                        spec.run.trace_stride);
        } else {
            TactSampler sampler(make_sampler_config(spec, chain_seed),
                                make_profile(spec.sampler), target,
                                make_oracle_spec(spec.model));
            if (!spec.sampler.bias_warm_start.empty()) {
                std::ifstream in(spec.sampler.bias_warm_start);
                if (!in)
                    throw InvalidInput("cannot open bias warm start '" +
                                       spec.sampler.bias_warm_start + "'");
                sampler.warm_start_bias(
                    BiasTable::load_csv(in, bias_mode_from_string(spec.sampler.bias_mode)));
            }
            outcome.store =
                sampler.run(spec.run.n_steps, spec.run.burn_in, spec.run.trace_stride);
            outcome.bias = sampler.bias();
        }
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

void write_manifest(const fs::path& path, const RunManifest& manifest) {
    std::ofstream out(path);
    out << "# tact-hmc run manifest\n";
    out << "# version: " << manifest.version << "\n";
    out << "# kernel_isa: " << manifest.kernel_isa << "\n";
    out << "# status: " << manifest.status << "\n";
    out << "# wall_clock_seconds: " << manifest.wall_clock_seconds << "\n";
    out << "# chain_seeds:";
    for (std::uint64_t s : manifest.chain_seeds) out << ' ' << s;
    out << "\n# files:";
    for (const auto& f : manifest.files) out << ' ' << f;
    out << "\n# resolved config follows; rerun with `tact sample --config manifest.txt"
           " --run.output_dir=<dir>`\n";
    out << serialize_config(manifest.spec);
}

}  // namespace

RunManifest run_experiment(const ExperimentSpec& raw_spec) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentSpec spec = resolved(raw_spec);

    RunManifest manifest;
    manifest.spec = spec;
    manifest.kernel_isa = std::string(kernels::active_isa());
    manifest.output_dir = spec.run.output_dir;

    const fs::path dir(spec.run.output_dir);
    fs::create_directories(dir);

    const std::shared_ptr<const Target> target = make_target(spec.model);
    for (std::size_t i = 0; i < spec.run.n_chains; ++i)
        manifest.chain_seeds.push_back(derive_chain_seed(spec.run.seed, i));

    // Worker pool; chain i's outcome goes into slot i, so thread timing never
    // changes the result.
    std::vector<ChainOutcome> outcomes(spec.run.n_chains);
    std::size_t jobs = spec.run.jobs != 0 ? spec.run.jobs
                                          : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<std::size_t>(jobs, spec.run.n_chains);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < spec.run.n_chains; ++i)
            outcomes[i] = run_one_chain(spec, target, manifest.chain_seeds[i]);
    } else {
        std::vector<std::thread> pool;
        std::mutex next_mutex;
        std::size_t next = 0;
        for (std::size_t w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> lock(next_mutex);
                        if (next >= outcomes.size()) return;
                        i = next++;
                    }
                    outcomes[i] = run_one_chain(spec, target, manifest.chain_seeds[i]);
                }
            });
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < outcomes.size(); ++i)
        if (!outcomes[i].error.empty()) {
            manifest.status = "diverged: chain " + std::to_string(i) + ": " +
                              outcomes[i].error;
            break;
        }

    std::vector<SampleStore> stores;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const std::string samples_name = "chain_" + std::to_string(i) + "_samples.csv";
        const std::string trace_name = "chain_" + std::to_string(i) + "_trace.csv";
        {
            std::ofstream out(dir / samples_name);
            write_samples_csv(out, outcomes[i].store);
        }
        manifest.files.push_back(samples_name);
        if (spec.run.trace_stride > 0) {
            std::ofstream out(dir / trace_name);
            write_trace_csv(out, outcomes[i].store);
            manifest.files.push_back(trace_name);
        }
        stores.push_back(std::move(outcomes[i].store));
    }
    if (outcomes.front().bias) {
        std::ofstream out(dir / "bias_table.csv");
        outcomes.front().bias->save_csv(out);
        manifest.files.push_back("bias_table.csv");
    }

    manifest.report = compute_report(spec, *target, stores);
    {
        std::ofstream out(dir / "report.csv");
        write_report_csv(out, manifest.report);
        manifest.files.push_back("report.csv");
    }
    if (manifest.report.theta_histogram) {
        std::ofstream out(dir / "histogram.csv");
        write_histogram_csv(out, *manifest.report.theta_histogram);
        manifest.files.push_back("histogram.csv");
    }
    if (manifest.report.theta_acf) {
        std::ofstream out(dir / "acf.csv");
        write_acf_csv(out, *manifest.report.theta_acf);
        manifest.files.push_back("acf.csv");
    }

    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(dir / "manifest.txt", manifest);
    return manifest;
}

RunManifest run_ablation_matrix(const ExperimentSpec& raw_spec) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentSpec spec = resolved(raw_spec);
    const fs::path dir(spec.run.output_dir);
    fs::create_directories(dir);

    const std::array<std::pair<std::string, std::string>, 3> variants = {{
        {"full", "tact"},
        {"no_thermostat", "ablation_no_thermostat"},
        {"no_tempering", "ablation_no_tempering"},
    }};

    RunManifest top;
    top.spec = spec;
    top.kernel_isa = std::string(kernels::active_isa());
    top.output_dir = spec.run.output_dir;
    top.chain_seeds.push_back(spec.run.seed);

    std::vector<std::vector<double>> theta0_by_variant;
    std::vector<double> tv_by_variant;
    const std::shared_ptr<const Target> target = make_target(spec.model);
    const auto density = marginal_density(*target);

    for (const auto& [name, method] : variants) {
        ExperimentSpec sub = spec;
        sub.sampler.method = method;
        sub.run.output_dir = (dir / name).string();
        if (method == "ablation_no_thermostat") {
            // No friction to pair the injected noise with: the ablation runs
            // as plain tempered HMC on whatever gradient noise the model has.
            sub.sampler.c_theta = 0.0;
            sub.sampler.c_xi = 0.0;
        }
        const RunManifest sub_manifest = run_experiment(sub);
        if (!sub_manifest.ok() && top.ok()) top.status = sub_manifest.status;
        for (const auto& f : sub_manifest.files) top.files.push_back(name + "/" + f);

        std::vector<double> theta0;
        for (std::size_t c = 0; c < sub.run.n_chains; ++c) {
            std::ifstream in(dir / name / ("chain_" + std::to_string(c) + "_samples.csv"));
            if (!in) continue;
            const SampleStore store = read_samples_csv(in);
            const auto column = store.component(0);
            theta0.insert(theta0.end(), column.begin(), column.end());
        }
        double tv = std::nan("");
        if (density && !theta0.empty()) {
            double lo = spec.diagnostics.histogram_min;
            double hi = spec.diagnostics.histogram_max;
            if (!(hi > lo)) {
                lo = *std::min_element(theta0.begin(), theta0.end());
                hi = *std::max_element(theta0.begin(), theta0.end());
                if (!(hi > lo)) hi = lo + 1.0;
            }
            tv = tv_distance(histogram(theta0, uniform_edges(lo, hi,
                                                             spec.diagnostics.histogram_bins)),
                             *density);
        }
        theta0_by_variant.push_back(std::move(theta0));
        tv_by_variant.push_back(tv);
    }

    DiagnosticsReport report;
    for (std::size_t v = 0; v < variants.size(); ++v)
        report.rows.push_back({"tv_" + variants[v].first, tv_by_variant[v], 0.0, false, true});
    if (std::isfinite(tv_by_variant[0]) && std::isfinite(tv_by_variant[1]) &&
        tv_by_variant[0] > 0.0)
        report.rows.push_back({"tv_ratio_no_thermostat", tv_by_variant[1] / tv_by_variant[0],
                               0.0, false, true});

    // Mode occupancy on 1D multimodal targets: how much mass the tempered and
    // untempered runs leave outside the starting basin.
    if (const auto* mixture = dynamic_cast<const GaussianMixtureTarget*>(target.get());
        mixture != nullptr && mixture->dim() == 1 && mixture->components().size() > 1) {
        std::vector<double> modes;
        for (const auto& c : mixture->components()) modes.push_back(c.mean[0]);
        const double start_theta =
            spec.model.theta_init.empty() ? 0.0 : spec.model.theta_init[0];
        std::vector<double> sorted_modes = modes;
        std::sort(sorted_modes.begin(), sorted_modes.end());
        std::size_t start_basin = 0;
        double best = std::abs(start_theta - sorted_modes[0]);
        for (std::size_t m = 1; m < sorted_modes.size(); ++m)
            if (std::abs(start_theta - sorted_modes[m]) < best) {
                best = std::abs(start_theta - sorted_modes[m]);
                start_basin = m;
            }
        for (std::size_t v = 0; v < variants.size(); ++v) {
            if (theta0_by_variant[v].empty()) continue;
            const auto masses = mode_masses(theta0_by_variant[v], sorted_modes);
            const double far_mass = 1.0 - masses[start_basin];
            const double min_mass = *std::min_element(masses.begin(), masses.end());
            report.rows.push_back(
                {"far_basin_mass_" + variants[v].first, far_mass, 0.0, false, true});
            report.rows.push_back(
                {"min_basin_mass_" + variants[v].first, min_mass, 0.0, false, true});
        }
    }

    top.report = report;
    {
        std::ofstream out(dir / "report.csv");
        write_report_csv(out, report);
        top.files.push_back("report.csv");
    }
    top.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(dir / "manifest.txt", top);
    return top;
}

std::vector<BaselineConfig> tuning_grid(const ExperimentSpec& spec, BaselineKind kind) {
    std::vector<BaselineConfig> grid;
    const auto& tuning = spec.tuning;
    if (tuning.step_sizes.empty()) throw InvalidInput("tuning grid has no step sizes");
    for (double step : tuning.step_sizes) {
        if (kind == BaselineKind::sgld) {
            BaselineConfig c = make_baseline_config(spec, kind, 0);
            c.step_size = step;
            c.friction_or_noise_level = 0.0;
            grid.push_back(c);
            continue;
        }
        const std::vector<double>& frictions =
            tuning.frictions.empty() ? std::vector<double>{0.0} : tuning.frictions;
        for (double friction : frictions) {
            BaselineConfig c = make_baseline_config(spec, kind, 0);
            c.step_size = step;
            c.friction_or_noise_level = friction;
            grid.push_back(c);
        }
    }
    return grid;
}

BaselineConfig tune_baseline(const ExperimentSpec& raw_spec,
                             const std::vector<BaselineConfig>& grid) {
    if (grid.empty()) throw InvalidInput("baseline tuning grid is empty");
    const ExperimentSpec spec = resolved(raw_spec);
    const std::shared_ptr<const Target> target = make_target(spec.model);
    const auto density = marginal_density(*target);
    if (!density)
        throw InvalidInput("baseline tuning needs a target with an analytic density");

    const std::size_t n_steps = std::max<std::size_t>(spec.tuning.tune_steps, 10);
    const std::size_t burn_in = n_steps / 5;

    double best_tv = std::numeric_limits<double>::infinity();
    std::size_t best_index = grid.size();
    std::vector<std::string> failures;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        BaselineConfig candidate = grid[g];
        candidate.seed = derive_stream_seed(spec.run.seed, 100 + g);
        try {
            BaselineSampler sampler(candidate, target, make_oracle_spec(spec.model));
            const SampleStore store = sampler.run(n_steps, burn_in);
            const auto theta0 = store.component(0);
            if (theta0.size() < 10) throw InsufficientDataError("too few tuning samples");
            const double lo = *std::min_element(theta0.begin(), theta0.end());
            const double hi = *std::max_element(theta0.begin(), theta0.end());
            const double tv = tv_distance(
                histogram(theta0,
                          uniform_edges(lo, hi > lo ? hi : lo + 1.0,
                                        spec.diagnostics.histogram_bins)),
                *density);
            if (tv < best_tv) {
                best_tv = tv;
                best_index = g;
            }
        } catch (const std::exception& e) {
            failures.push_back("grid point " + std::to_string(g) + " (step " +
                               format_double(grid[g].step_size) + ", friction " +
                               format_double(grid[g].friction_or_noise_level) +
                               "): " + e.what());
        }
    }
    if (best_index == grid.size()) {
        std::string message = "every tuning grid point diverged:";
        for (const auto& f : failures) message += "\n  " + f;
        throw InvalidInput(message);
    }
    return grid[best_index];
}

RunManifest run_comparison(const ExperimentSpec& raw_spec) {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentSpec spec = resolved(raw_spec);
    const fs::path dir(spec.run.output_dir);
    fs::create_directories(dir);

    RunManifest top;
    top.spec = spec;
    top.kernel_isa = std::string(kernels::active_isa());
    top.output_dir = spec.run.output_dir;
    top.chain_seeds.push_back(spec.run.seed);

    const std::array<std::string, 4> methods = {"tact", "sgld", "sghmc", "sgnht"};
    DiagnosticsReport report;
    for (const auto& method : methods) {
        ExperimentSpec sub = spec;
        sub.sampler.method = method;
        sub.run.output_dir = (dir / method).string();
        if (method != "tact") {
            const BaselineConfig best =
                tune_baseline(spec, tuning_grid(spec, baseline_kind_from_string(method)));
            sub.sampler.step_size = best.step_size;
            sub.sampler.friction = best.friction_or_noise_level;
            report.rows.push_back(
                {"tuned_step_" + method, best.step_size, 0.0, false, true});
            report.rows.push_back({"tuned_friction_" + method,
                                   best.friction_or_noise_level, 0.0, false, true});
        }
        const RunManifest sub_manifest = run_experiment(sub);
        if (!sub_manifest.ok() && top.ok()) top.status = sub_manifest.status;
        for (const auto& f : sub_manifest.files) top.files.push_back(method + "/" + f);
        if (const ReportRow* tv = sub_manifest.report.find("tv_to_analytic"))
            report.rows.push_back({"tv_" + method, tv->value, 0.0, false, true});
        if (const ReportRow* ess = sub_manifest.report.find("ess_theta0"))
            report.rows.push_back({"ess_" + method, ess->value, 0.0, false, true});
    }

    top.report = report;
    {
        std::ofstream out(dir / "report.csv");
        write_report_csv(out, report);
        top.files.push_back("report.csv");
    }
    top.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(dir / "manifest.txt", top);
    return top;
}

DiagnosticsReport diagnose_directory(const std::string& dir_name) {
    const fs::path dir(dir_name);
    const fs::path manifest_path = dir / "manifest.txt";
    if (!fs::exists(manifest_path))
        throw InvalidInput("no manifest.txt under '" + dir_name + "'");
    const ExperimentSpec spec = parse_config_file(manifest_path.string());
    const std::shared_ptr<const Target> target = make_target(spec.model);

    std::vector<SampleStore> stores;
    for (std::size_t i = 0;; ++i) {
        const fs::path samples = dir / ("chain_" + std::to_string(i) + "_samples.csv");
        if (!fs::exists(samples)) break;
        std::ifstream in(samples);
        SampleStore store = read_samples_csv(in);
        const fs::path trace = dir / ("chain_" + std::to_string(i) + "_trace.csv");
        if (fs::exists(trace)) {
            std::ifstream tin(trace);
            store.traces = read_trace_csv(tin);
        }
        stores.push_back(std::move(store));
    }
    if (stores.empty()) throw InvalidInput("no chain CSVs under '" + dir_name + "'");

    const DiagnosticsReport report = compute_report(spec, *target, stores);
    {
        std::ofstream out(dir / "report.csv");
        write_report_csv(out, report);
    }
    if (report.theta_histogram) {
        std::ofstream out(dir / "histogram.csv");
        write_histogram_csv(out, *report.theta_histogram);
    }
    if (report.theta_acf) {
        std::ofstream out(dir / "acf.csv");
        write_acf_csv(out, *report.theta_acf);
    }
    return report;
}

}  // namespace tact
