#include "tact/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "tact/errors.hpp"

namespace tact {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("key '" + key + "': expected a number, got '" + value + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    try {
        if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("key '" + key + "': expected a nonnegative integer, got '" + value +
                         "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ParseError("key '" + key + "': expected true or false, got '" + value + "'");
}

std::vector<double> parse_vector(const std::string& key, const std::string& value) {
    std::vector<double> out;
    const std::string v = trim(value);
    if (v.empty()) return out;
    std::istringstream stream(v);
    std::string item;
    while (std::getline(stream, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& key,
                                              const std::string& value) {
    std::vector<std::vector<double>> out;
    const std::string v = trim(value);
    if (v.empty()) return out;
    std::istringstream stream(v);
    std::string group;
    while (std::getline(stream, group, ';')) out.push_back(parse_vector(key, trim(group)));
    return out;
}

std::string serialize_vector(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_value(v[i]);
    }
    return out;
}

std::string serialize_matrix(const std::vector<std::vector<double>>& m) {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) out += "; ";
        out += serialize_vector(m[i]);
    }
    return out;
}

struct Binding {
    std::string section;
    std::string key;
    std::function<void(ExperimentSpec&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentSpec&)> get;
};

// One declarative table drives parsing, unknown-key detection and the
// canonical serialization; keys appear in serialization order.
const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = [] {
        std::vector<Binding> b;
        auto add_double = [&b](const char* sec, const char* key, auto member) {
            b.push_back({sec, key,
                         [member](ExperimentSpec& s, const std::string& k,
                                  const std::string& v) { member(s) = parse_double(k, v); },
                         [member](const ExperimentSpec& s) {
                             return format_value(member(const_cast<ExperimentSpec&>(s)));
                         }});
        };
        auto add_uint = [&b](const char* sec, const char* key, auto member) {
            b.push_back({sec, key,
                         [member](ExperimentSpec& s, const std::string& k,
                                  const std::string& v) { member(s) = parse_uint(k, v); },
                         [member](const ExperimentSpec& s) {
                             return std::to_string(member(const_cast<ExperimentSpec&>(s)));
                         }});
        };
        auto add_bool = [&b](const char* sec, const char* key, auto member) {
            b.push_back({sec, key,
                         [member](ExperimentSpec& s, const std::string& k,
                                  const std::string& v) { member(s) = parse_bool(k, v); },
                         [member](const ExperimentSpec& s) {
                             return member(const_cast<ExperimentSpec&>(s)) ? "true" : "false";
                         }});
        };
        auto add_string = [&b](const char* sec, const char* key, auto member) {
            b.push_back({sec, key,
                         [member](ExperimentSpec& s, const std::string&,
                                  const std::string& v) { member(s) = v; },
                         [member](const ExperimentSpec& s) {
                             return member(const_cast<ExperimentSpec&>(s));
                         }});
        };
        auto add_vector = [&b](const char* sec, const char* key, auto member) {
            b.push_back({sec, key,
                         [member](ExperimentSpec& s, const std::string& k,
                                  const std::string& v) { member(s) = parse_vector(k, v); },
                         [member](const ExperimentSpec& s) {
                             return serialize_vector(member(const_cast<ExperimentSpec&>(s)));
                         }});
        };
        auto add_matrix = [&b](const char* sec, const char* key, auto member) {
            b.push_back({sec, key,
                         [member](ExperimentSpec& s, const std::string& k,
                                  const std::string& v) { member(s) = parse_matrix(k, v); },
                         [member](const ExperimentSpec& s) {
                             return serialize_matrix(member(const_cast<ExperimentSpec&>(s)));
                         }});
        };

#define TACT_MEMBER(path) [](auto& s) -> auto& { return s.path; }
        add_string("model", "kind", TACT_MEMBER(model.kind));
        add_vector("model", "weights", TACT_MEMBER(model.weights));
        add_matrix("model", "means", TACT_MEMBER(model.means));
        add_matrix("model", "variances", TACT_MEMBER(model.variances));
        add_vector("model", "prior_mean", TACT_MEMBER(model.prior_mean));
        add_double("model", "prior_variance", TACT_MEMBER(model.prior_variance));
        add_double("model", "observation_variance", TACT_MEMBER(model.observation_variance));
        add_vector("model", "data_location", TACT_MEMBER(model.data_location));
        add_uint("model", "n_observations", TACT_MEMBER(model.n_observations));
        add_uint("model", "n_features", TACT_MEMBER(model.n_features));
        add_vector("model", "true_theta", TACT_MEMBER(model.true_theta));
        add_string("model", "dataset_file", TACT_MEMBER(model.dataset_file));
        add_uint("model", "data_seed", TACT_MEMBER(model.data_seed));
        add_double("model", "potential_noise_std", TACT_MEMBER(model.potential_noise_std));
        add_double("model", "force_noise_std", TACT_MEMBER(model.force_noise_std));
        add_uint("model", "batch_size", TACT_MEMBER(model.batch_size));
        add_vector("model", "theta_init", TACT_MEMBER(model.theta_init));

        add_string("sampler", "method", TACT_MEMBER(sampler.method));
        add_double("sampler", "eta_theta", TACT_MEMBER(sampler.eta_theta));
        add_double("sampler", "eta_xi", TACT_MEMBER(sampler.eta_xi));
        add_double("sampler", "c_theta", TACT_MEMBER(sampler.c_theta));
        add_double("sampler", "c_xi", TACT_MEMBER(sampler.c_xi));
        add_double("sampler", "gamma_theta", TACT_MEMBER(sampler.gamma_theta));
        add_double("sampler", "gamma_xi", TACT_MEMBER(sampler.gamma_xi));
        add_uint("sampler", "steps_per_unit", TACT_MEMBER(sampler.steps_per_unit));
        add_double("sampler", "xi0", TACT_MEMBER(sampler.xi0));
        add_double("sampler", "xi1", TACT_MEMBER(sampler.xi1));
        add_uint("sampler", "coupling_exponent", TACT_MEMBER(sampler.coupling_exponent));
        add_double("sampler", "well_halfwidth", TACT_MEMBER(sampler.well_halfwidth));
        add_double("sampler", "temperature", TACT_MEMBER(sampler.temperature));
        add_string("sampler", "bias_mode", TACT_MEMBER(sampler.bias_mode));
        add_uint("sampler", "bias_bins", TACT_MEMBER(sampler.bias_bins));
        add_double("sampler", "metadynamics_height",
                   TACT_MEMBER(sampler.metadynamics_height));
        add_string("sampler", "bias_warm_start", TACT_MEMBER(sampler.bias_warm_start));
        add_bool("sampler", "resample_momenta", TACT_MEMBER(sampler.resample_momenta));
        add_double("sampler", "step_size", TACT_MEMBER(sampler.step_size));
        add_double("sampler", "friction", TACT_MEMBER(sampler.friction));

        add_uint("run", "n_steps", TACT_MEMBER(run.n_steps));
        add_uint("run", "burn_in", TACT_MEMBER(run.burn_in));
        add_uint("run", "n_chains", TACT_MEMBER(run.n_chains));
        add_uint("run", "seed", TACT_MEMBER(run.seed));
        add_uint("run", "trace_stride", TACT_MEMBER(run.trace_stride));
        add_string("run", "output_dir", TACT_MEMBER(run.output_dir));
        add_uint("run", "jobs", TACT_MEMBER(run.jobs));

        add_uint("diagnostics", "histogram_bins", TACT_MEMBER(diagnostics.histogram_bins));
        add_double("diagnostics", "histogram_min", TACT_MEMBER(diagnostics.histogram_min));
        add_double("diagnostics", "histogram_max", TACT_MEMBER(diagnostics.histogram_max));
        add_uint("diagnostics", "ess_max_lag", TACT_MEMBER(diagnostics.ess_max_lag));
        add_uint("diagnostics", "xi_bins", TACT_MEMBER(diagnostics.xi_bins));
        add_bool("diagnostics", "gate", TACT_MEMBER(diagnostics.gate));
        add_double("diagnostics", "tv_threshold", TACT_MEMBER(diagnostics.tv_threshold));
        add_double("diagnostics", "xi_flatness_threshold",
                   TACT_MEMBER(diagnostics.xi_flatness_threshold));
        add_double("diagnostics", "unity_fraction_min",
                   TACT_MEMBER(diagnostics.unity_fraction_min));
        add_double("diagnostics", "unity_fraction_max",
                   TACT_MEMBER(diagnostics.unity_fraction_max));
        add_double("diagnostics", "ess_min", TACT_MEMBER(diagnostics.ess_min));

        add_vector("tuning", "step_sizes", TACT_MEMBER(tuning.step_sizes));
        add_vector("tuning", "frictions", TACT_MEMBER(tuning.frictions));
        add_uint("tuning", "tune_steps", TACT_MEMBER(tuning.tune_steps));
#undef TACT_MEMBER
        return b;
    }();
    return table;
}

const Binding* find_binding(const std::string& section, const std::string& key) {
    for (const auto& b : bindings())
        if (b.section == section && b.key == key) return &b;
    return nullptr;
}

void apply_pair(ExperimentSpec& spec, std::set<std::string>& seen,
                const std::string& section, const std::string& key,
                const std::string& value) {
    const std::string full = section + "." + key;
    const Binding* binding = find_binding(section, key);
    if (binding == nullptr) throw ParseError("unknown key '" + full + "'");
    binding->set(spec, full, value);
    seen.insert(full);
}

void check_constraints(const ExperimentSpec& spec) {
    auto fail = [](const std::string& key, const std::string& what) {
        throw ParseError("key '" + key + "': " + what);
    };
    const auto& s = spec.sampler;
    if (s.eta_theta <= 0.0) fail("sampler.eta_theta", "must be positive");
    if (s.eta_xi <= 0.0) fail("sampler.eta_xi", "must be positive");
    if (s.c_theta < 0.0) fail("sampler.c_theta", "must be >= 0");
    if (s.c_xi < 0.0) fail("sampler.c_xi", "must be >= 0");
    if (s.gamma_theta <= 0.0) fail("sampler.gamma_theta", "must be positive");
    if (s.gamma_xi <= 0.0) fail("sampler.gamma_xi", "must be positive");
    if (s.steps_per_unit < 1) fail("sampler.steps_per_unit", "must be >= 1");
    if (s.xi0 <= 0.0) fail("sampler.xi0", "must be positive");
    if (s.xi1 <= s.xi0) fail("sampler.xi1", "must exceed xi0");
    if (s.coupling_exponent < 2) fail("sampler.coupling_exponent", "must be >= 2");
    if (s.well_halfwidth <= s.xi0) fail("sampler.well_halfwidth", "must exceed xi0");
    if (s.temperature <= 0.0) fail("sampler.temperature", "must be positive");
    if (s.bias_bins == 0) fail("sampler.bias_bins", "must be >= 1");
    if (s.metadynamics_height <= 0.0) fail("sampler.metadynamics_height", "must be positive");
    if (s.step_size <= 0.0) fail("sampler.step_size", "must be positive");
    if (s.friction < 0.0) fail("sampler.friction", "must be >= 0");
    static const std::set<std::string> kMethods = {
        "tact", "sgld", "sghmc", "sgnht", "ablation_no_thermostat", "ablation_no_tempering"};
    if (kMethods.count(s.method) == 0) fail("sampler.method", "unknown method '" + s.method + "'");
    static const std::set<std::string> kBias = {"abf_paper", "abf_per_bin", "metadynamics",
                                                "none"};
    if (kBias.count(s.bias_mode) == 0) fail("sampler.bias_mode", "unknown mode '" + s.bias_mode + "'");

    const auto& m = spec.model;
    static const std::set<std::string> kKinds = {"gaussian_mixture", "conjugate_gaussian",
                                                 "logistic_regression"};
    if (kKinds.count(m.kind) == 0) fail("model.kind", "unknown kind '" + m.kind + "'");
    if (m.potential_noise_std < 0.0) fail("model.potential_noise_std", "must be >= 0");
    if (m.force_noise_std < 0.0) fail("model.force_noise_std", "must be >= 0");
    if (m.prior_variance <= 0.0) fail("model.prior_variance", "must be positive");
    if (m.observation_variance <= 0.0) fail("model.observation_variance", "must be positive");

    const auto& r = spec.run;
    if (r.n_steps > 0 && r.burn_in != RunSection::kAutoBurnIn && r.burn_in >= r.n_steps)
        fail("run.burn_in", "must be smaller than run.n_steps");
    if (r.n_chains == 0) fail("run.n_chains", "must be >= 1");

    const auto& d = spec.diagnostics;
    if (d.histogram_bins < 1) fail("diagnostics.histogram_bins", "must be >= 1");
    if (d.xi_bins < 1) fail("diagnostics.xi_bins", "must be >= 1");
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text,
                                 const std::vector<std::string>& overrides) {
    ExperimentSpec spec;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ParseError("key '" + key + "' appears before any [section] header");
        apply_pair(spec, seen, section, key, value);
    }

    for (const std::string& raw : overrides) {
        std::string item = raw;
        if (item.rfind("--", 0) == 0) item = item.substr(2);
        const std::size_t eq = item.find('=');
        const std::size_t dot = item.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw ParseError("malformed override '" + raw +
                             "' (expected --section.key=value)");
        apply_pair(spec, seen, trim(item.substr(0, dot)),
                   trim(item.substr(dot + 1, eq - dot - 1)), trim(item.substr(eq + 1)));
    }

    if (spec.run.burn_in == RunSection::kAutoBurnIn) spec.run.burn_in = spec.run.n_steps / 5;
    check_constraints(spec);
    return spec;
}

ExperimentSpec parse_config_file(const std::string& path,
                                 const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), overrides);
}

ExperimentSpec resolved(ExperimentSpec spec) {
    if (spec.run.burn_in == RunSection::kAutoBurnIn) spec.run.burn_in = spec.run.n_steps / 5;
    return spec;
}

std::string serialize_config(const ExperimentSpec& spec) {
    std::string out;
    std::string current_section;
    for (const auto& b : bindings()) {
        if (b.section != current_section) {
            if (!out.empty()) out += "\n";
            out += "[" + b.section + "]\n";
            current_section = b.section;
        }
        out += b.key + " = " + b.get(spec) + "\n";
    }
    return out;
}

}  // namespace tact
