#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "jcnoise/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerifyFailed = 3;

int run_verify(const jcnoise::ExperimentConfig& config) {
    jcnoise::VerifyOptions options;
    options.cutoff = config.cutoff;
    options.perturb = config.debug_perturb;
    options.threads = config.threads;
    const auto report = jcnoise::verify_suite(options);
    const std::string text = jcnoise::render_report(report);
    std::cout << text;
    jcnoise::write_file_atomic(config.output_path, text);
    return report.passed() ? kExitOk : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const auto command = jcnoise::parse_config(args);
        if (command.help) {
            std::cout << *command.help;
            return kExitOk;
        }
        const auto& config = command.config;
        if (config.scenario == jcnoise::Scenario::verify) {
            return run_verify(config);
        }
        const auto summary = jcnoise::run_scenario(config);
        for (const auto& file : summary.files) {
            std::cout << "wrote " << file.string() << "\n";
        }
        if (config.state == jcnoise::FieldKind::mtcs ||
            config.state == jcnoise::FieldKind::photon_added_mtcs) {
            std::cout << "q = " << jcnoise::format_double(summary.resolved_q) << "\n";
        }
        return kExitOk;
    } catch (const jcnoise::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n"
                  << "run 'jcnoise --help' for the list of flags\n";
        return kExitUsage;
    } catch (const jcnoise::CutoffTooSmall& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
