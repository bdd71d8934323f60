// Command-line front end.
//
//   tact sample   [--config FILE] [--section.key=value ...]
//   tact ablate   [--config FILE] [overrides]   three-variant ablation matrix
//   tact compare  [--config FILE] [overrides]   TACT vs grid-tuned baselines
//   tact diagnose --dir DIR                     recompute report.csv from CSVs
//
// Exit codes: 0 ok, 2 config error, 3 divergence, 4 diagnostics threshold
// failure (with [diagnostics] gate = true).
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "tact/config.hpp"
#include "tact/errors.hpp"
#include "tact/experiment.hpp"
#include "tact/kernels.hpp"

namespace {

void print_usage() {
    std::cout <<
        "usage: tact <sample|ablate|compare|diagnose> [options]\n"
        "\n"
        "  sample    run one experiment spec\n"
        "  ablate    run the full / no_thermostat / no_tempering matrix\n"
        "  compare   grid-tune SGLD/SGHMC/SGNHT and compare against TACT-HMC\n"
        "  diagnose  recompute report.csv from a finished run directory\n"
        "\n"
        "options:\n"
        "  --config FILE          config file ([section] headers, key = value, # comments)\n"
        "  --section.key=value    override any config key (e.g. --run.n_steps=100000)\n"
        "  --dir DIR              run directory (diagnose only)\n"
        "  --help                 this text\n";
}

void print_report(const tact::DiagnosticsReport& report) {
    for (const auto& row : report.rows) {
        std::cout << row.metric << " = " << row.value;
        if (row.has_threshold)
            std::cout << " (threshold " << row.threshold << ", "
                      << (row.pass ? "pass" : "FAIL") << ")";
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        print_usage();
        return args.empty() ? tact::kExitConfigError : tact::kExitOk;
    }
    const std::string command = args[0];

    std::string config_file;
    std::string dir;
    std::vector<std::string> overrides;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& arg = args[i];
        if (arg == "--help" || arg == "-h") {
            print_usage();
            return tact::kExitOk;
        }
        if (arg == "--config" && i + 1 < args.size()) {
            config_file = args[++i];
        } else if (arg.rfind("--config=", 0) == 0) {
            config_file = arg.substr(9);
        } else if (arg == "--dir" && i + 1 < args.size()) {
            dir = args[++i];
        } else if (arg.rfind("--dir=", 0) == 0) {
            dir = arg.substr(6);
        } else if (arg.rfind("--", 0) == 0 && arg.find('=') != std::string::npos) {
            overrides.push_back(arg);
        } else {
            std::cerr << "error: unrecognized argument '" << arg << "'\n";
            return tact::kExitConfigError;
        }
    }

    try {
        if (command == "diagnose") {
            if (dir.empty()) {
                std::cerr << "error: diagnose needs --dir DIR\n";
                return tact::kExitConfigError;
            }
            print_report(tact::diagnose_directory(dir));
            return tact::kExitOk;
        }

        tact::ExperimentSpec spec = config_file.empty()
                                        ? tact::parse_config_text("", overrides)
                                        : tact::parse_config_file(config_file, overrides);

        tact::RunManifest manifest;
        if (command == "sample") manifest = tact::run_experiment(spec);
        else if (command == "ablate") manifest = tact::run_ablation_matrix(spec);
        else if (command == "compare") manifest = tact::run_comparison(spec);
        else {
            std::cerr << "error: unknown command '" << command << "'\n";
            print_usage();
            return tact::kExitConfigError;
        }

        std::cout << "output: " << manifest.output_dir << " (kernels: "
                  << manifest.kernel_isa << ", " << manifest.wall_clock_seconds << " s)\n";
        print_report(manifest.report);
        if (!manifest.ok()) std::cerr << "error: " << manifest.status << "\n";
        return manifest.exit_code();
    } catch (const tact::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return tact::kExitConfigError;
    } catch (const tact::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return tact::kExitDivergence;
    } catch (const tact::StepTooLargeError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return tact::kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tact::kExitConfigError;
    }
}
