#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jcnoise/errors.hpp"
#include "jcnoise/field_states.hpp"
#include "jcnoise/observables.hpp"

namespace jcnoise {

/// Bad command line or config file. The message names the offending flag.
class UsageError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

enum class Scenario { distribution, inversion, negativity, verify };

enum class FieldKind { coherent, thermal, dts, mtcs, pacs, photon_added_dts, photon_added_mtcs };

enum class QMode { equal_overlap, explicit_q };

struct ExperimentConfig {
    Scenario scenario = Scenario::distribution;
    FieldKind state = FieldKind::dts;
    double alpha_sq = 10.0;
    double theta = 0.0;
    double nbar = 0.0;
    QMode q_mode = QMode::equal_overlap;
    double q = 0.5;
    int order = 1;
    std::size_t cutoff = kDefaultCutoff;
    double t_max = kDefaultTMax;
    std::size_t steps = kDefaultSteps;
    Propagator propagator = Propagator::analytic;
    std::string output_path;
    unsigned threads = 0;
    /// verify only: name of a formula to perturb deliberately.
    std::string debug_perturb;

    Complex alpha() const;
    /// q actually used for MTCS kinds.
    double resolved_q() const;
};

/// Parsed command line; `help` holds the rendered help text when --help was
/// requested, in which case `config` is default.
struct CommandLine {
    ExperimentConfig config;
    std::optional<std::string> help;
};

/// args[0] is the subcommand (state, evolve, verify). Flags override values
/// read from --config FILE. Throws UsageError.
CommandLine parse_config(const std::vector<std::string>& args);

/// Applies flat key=value text. `origin` is used in error messages.
void apply_config_text(ExperimentConfig& config, const std::string& text, const std::string& origin);

std::string to_string(FieldKind kind);
std::string to_string(Scenario scenario);
std::string to_string(Propagator propagator);

/// Builds the field the config describes; photon addition happens after q is
/// resolved from the un-added amplitude.
FieldState build_field(const ExperimentConfig& config);

/// Formats a double with 17 significant digits.
std::string format_double(double value);

std::string render_distribution_csv(const std::vector<double>& distribution);
std::string render_series_csv(const TimeSeries& series);
std::string render_metadata(const ExperimentConfig& config, const FieldState& field);
std::string render_plot_script(const ExperimentConfig& config);

/// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

struct RunSummary {
    std::vector<std::filesystem::path> files;
    double resolved_q = 0.0;
    double tail_mass = 0.0;
};

/// Runs a distribution, inversion or negativity scenario and writes the CSV,
/// `<out>.meta` and `<out>.plot`.
RunSummary run_scenario(const ExperimentConfig& config);

enum class CheckStatus { pass, fail, skip };

/// How `measured` is compared against `bound`.
enum class Comparison { at_most, greater_than, equals };

struct CheckResult {
    std::string criterion;  // e.g. "C4"
    std::string name;
    CheckStatus status = CheckStatus::fail;
    double measured = 0.0;
    double bound = 0.0;
    Comparison comparison = Comparison::at_most;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool passed() const;
};

struct VerifyOptions {
    std::size_t cutoff = kDefaultCutoff;
    /// Empty, or "rabi-sqrt-n" to evaluate the vacuum Rabi check with the
    /// unshifted Rabi frequencies.
    std::string perturb;
    /// Scratch space for the sidecar round-trip check.
    std::filesystem::path scratch_dir;
    unsigned threads = 0;
};

VerificationReport verify_suite(const VerifyOptions& options);

std::string render_report(const VerificationReport& report);

std::string library_version();

} // namespace jcnoise
