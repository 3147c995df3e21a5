#include "jcnoise/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "jcnoise/jc_dynamics.hpp"

#ifndef JCNOISE_VERSION
#define JCNOISE_VERSION "dev"
#endif

namespace jcnoise {

namespace {

// Config-file keys that only describe a previous run; accepted and ignored
// so a sidecar can be fed back through --config.
const std::vector<std::string> kInformationalKeys = {"command", "resolved_q", "tail_mass",
                                                     "library_version"};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string flag_name(const std::string& key) {
    std::string out = "--" + key;
    std::replace(out.begin(), out.end(), '_', '-');
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError(flag_name(key) + ": expected a finite number, got '" + value + "'");
    }
}

long long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw UsageError(flag_name(key) + ": expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") {
        return true;
    }
    if (value == "false" || value == "0") {
        return false;
    }
    throw UsageError(flag_name(key) + ": expected true or false, got '" + value + "'");
}

FieldKind parse_kind(const std::string& value) {
    static const std::map<std::string, FieldKind> kinds = {
        {"coherent", FieldKind::coherent},
        {"thermal", FieldKind::thermal},
        {"dts", FieldKind::dts},
        {"mtcs", FieldKind::mtcs},
        {"pacs", FieldKind::pacs},
        {"photon_added_dts", FieldKind::photon_added_dts},
        {"photon_added_mtcs", FieldKind::photon_added_mtcs},
    };
    const auto it = kinds.find(value);
    if (it == kinds.end()) {
        throw UsageError("--state: unknown state kind '" + value + "'");
    }
    return it->second;
}

Propagator parse_propagator(const std::string& value) {
    if (value == "analytic") {
        return Propagator::analytic;
    }
    if (value == "numeric") {
        return Propagator::numeric;
    }
    throw UsageError("--propagator: expected analytic or numeric, got '" + value + "'");
}

Scenario parse_observable(const std::string& value) {
    if (value == "inversion") {
        return Scenario::inversion;
    }
    if (value == "negativity") {
        return Scenario::negativity;
    }
    throw UsageError("--observable: expected inversion or negativity, got '" + value + "'");
}

// One setter per key; config file and command line share them.
void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "state") {
        c.state = parse_kind(value);
    } else if (key == "alpha_sq") {
        c.alpha_sq = parse_double(key, value);
    } else if (key == "theta") {
        c.theta = parse_double(key, value);
    } else if (key == "nbar") {
        c.nbar = parse_double(key, value);
    } else if (key == "q") {
        c.q = parse_double(key, value);
        c.q_mode = QMode::explicit_q;
    } else if (key == "equal_overlap") {
        if (parse_bool(key, value)) {
            c.q_mode = QMode::equal_overlap;
        }
    } else if (key == "order") {
        c.order = static_cast<int>(parse_integer(key, value));
    } else if (key == "cutoff") {
        const long long v = parse_integer(key, value);
        if (v < 2) {
            throw UsageError("--cutoff: must be at least 2");
        }
        c.cutoff = static_cast<std::size_t>(v);
    } else if (key == "t_max") {
        c.t_max = parse_double(key, value);
    } else if (key == "steps") {
        const long long v = parse_integer(key, value);
        if (v < 1) {
            throw UsageError("--steps: must be positive");
        }
        c.steps = static_cast<std::size_t>(v);
    } else if (key == "propagator") {
        c.propagator = parse_propagator(value);
    } else if (key == "observable") {
        if (c.scenario != Scenario::distribution && c.scenario != Scenario::verify) {
            c.scenario = parse_observable(value);
        } else {
            parse_observable(value);
        }
    } else if (key == "out") {
        c.output_path = value;
    } else if (key == "threads") {
        const long long v = parse_integer(key, value);
        if (v < 0) {
            throw UsageError("--threads: must be nonnegative");
        }
        c.threads = static_cast<unsigned>(v);
    } else if (std::find(kInformationalKeys.begin(), kInformationalKeys.end(), key) ==
               kInformationalKeys.end()) {
        throw UsageError("unknown config key '" + key + "'");
    }
}

void validate(const ExperimentConfig& c) {
    if (c.alpha_sq < 0.0) {
        throw UsageError("--alpha-sq: must be nonnegative");
    }
    if (c.nbar < 0.0) {
        throw UsageError("--nbar: must be nonnegative");
    }
    if (c.q_mode == QMode::explicit_q && !(c.q >= 0.0 && c.q <= 1.0)) {
        throw UsageError("--q: must lie in [0, 1]");
    }
    if (c.order < 0) {
        throw UsageError("--order: must be nonnegative");
    }
    if (!(c.t_max > 0.0)) {
        throw UsageError("--t-max: must be positive");
    }
    if (c.scenario == Scenario::verify && c.cutoff < 60) {
        throw UsageError("--cutoff: verify needs a cutoff of at least 60");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("--config: cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

} // namespace

Complex ExperimentConfig::alpha() const {
    return std::polar(std::sqrt(alpha_sq), theta);
}

double ExperimentConfig::resolved_q() const {
    return q_mode == QMode::equal_overlap ? equal_overlap_q(alpha(), nbar) : q;
}

std::string library_version() {
    return JCNOISE_VERSION;
}

void apply_config_text(ExperimentConfig& config, const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError(origin + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            apply_key(config, key, value);
        } catch (const UsageError& e) {
            throw UsageError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

CommandLine parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Jaynes-Cummings dynamics with noisy coherent fields", "jcnoise"};
    app.require_subcommand(1, 1);

    std::map<std::string, std::string> flags;
    std::vector<std::pair<std::string, CLI::Option*>> registered;
    bool equal_overlap_flag = false;
    std::string config_path;

    auto add = [&](CLI::App* cmd, const std::string& key, const std::string& desc) {
        auto* opt = cmd->add_option(flag_name(key), flags[key], desc);
        static const std::map<std::string, std::string> kTypeNames = {
            {"alpha_sq", "FLOAT"}, {"theta", "FLOAT"}, {"nbar", "FLOAT"},   {"q", "FLOAT"},
            {"t_max", "FLOAT"},    {"order", "INT"},   {"cutoff", "INT"},   {"steps", "INT"},
            {"threads", "INT"},    {"out", "PATH"},    {"state", "KIND"},   {"propagator", "NAME"},
            {"observable", "NAME"}};
        if (const auto it = kTypeNames.find(key); it != kTypeNames.end()) {
            opt->type_name(it->second);
        }
        registered.emplace_back(key, opt);
        return opt;
    };
    auto add_field_flags = [&](CLI::App* cmd) {
        add(cmd, "state", "coherent|thermal|dts|mtcs|pacs|photon_added_dts|photon_added_mtcs");
        add(cmd, "alpha_sq", "|alpha|^2, coherent amplitude squared (default 10)");
        add(cmd, "theta", "phase of alpha in radians (default 0)");
        add(cmd, "nbar", "mean thermal photon number (default 0)");
        add(cmd, "q", "explicit coherent weight of the MTCS, in [0, 1]");
        cmd->add_flag("--equal-overlap", equal_overlap_flag,
                      "choose q so the MTCS and DTS overlap |alpha> equally (default)");
        add(cmd, "order", "order of the photon-added coherent state (pacs only, default 1)");
        add(cmd, "cutoff", "Fock-space dimension (default 150)");
        add(cmd, "out", "output CSV path");
        cmd->add_option("--config", config_path, "flat key=value file; flags override it")
            ->type_name("PATH");
    };

    auto* state_cmd = app.add_subcommand("state", "write the photon-number distribution as CSV");
    add_field_flags(state_cmd);

    auto* evolve_cmd = app.add_subcommand("evolve", "write inversion and negativity time series");
    add_field_flags(evolve_cmd);
    add(evolve_cmd, "t_max", "largest lambda*t (default 25)");
    add(evolve_cmd, "steps", "number of grid points (default 2001)");
    add(evolve_cmd, "propagator", "analytic|numeric (default analytic)");
    add(evolve_cmd, "observable", "inversion|negativity, selects the plotted panel");
    add(evolve_cmd, "threads", "worker threads for the time grid (0 = all cores)");

    auto* verify_cmd = app.add_subcommand("verify", "run the self-verification suite");
    add(verify_cmd, "cutoff", "Fock-space dimension (default 150, minimum 60)");
    add(verify_cmd, "out", "report path (default jcnoise_verify.txt)");
    add(verify_cmd, "threads", "worker threads (0 = all cores)");
    std::string perturb;
    verify_cmd->add_option("--debug-perturb", perturb, "deliberately break a formula")
        ->group("");

    CommandLine result;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        result.help = app.help("", CLI::AppFormatMode::All);
        return result;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    ExperimentConfig& c = result.config;
    if (state_cmd->parsed()) {
        c.scenario = Scenario::distribution;
    } else if (evolve_cmd->parsed()) {
        c.scenario = Scenario::inversion;
    } else {
        c.scenario = Scenario::verify;
    }

    if (!config_path.empty()) {
        apply_config_text(c, read_file(config_path), config_path);
    }
    for (const auto& [key, opt] : registered) {
        if (opt->count() > 0) {
            apply_key(c, key, flags[key]);
        }
    }
    if (equal_overlap_flag) {
        const bool q_given = std::any_of(registered.begin(), registered.end(), [](const auto& r) {
            return r.first == "q" && r.second->count() > 0;
        });
        if (q_given) {
            throw UsageError("--equal-overlap: cannot be combined with --q");
        }
        c.q_mode = QMode::equal_overlap;
    }
    c.debug_perturb = perturb;
    validate(c);
    if (c.output_path.empty()) {
        if (c.scenario == Scenario::verify) {
            c.output_path = "jcnoise_verify.txt";
        } else {
            throw UsageError("--out: an output path is required");
        }
    }
    return result;
}

std::string to_string(FieldKind kind) {
    switch (kind) {
    case FieldKind::coherent: return "coherent";
    case FieldKind::thermal: return "thermal";
    case FieldKind::dts: return "dts";
    case FieldKind::mtcs: return "mtcs";
    case FieldKind::pacs: return "pacs";
    case FieldKind::photon_added_dts: return "photon_added_dts";
    case FieldKind::photon_added_mtcs: return "photon_added_mtcs";
    }
    return "unknown";
}

std::string to_string(Scenario scenario) {
    switch (scenario) {
    case Scenario::distribution: return "distribution";
    case Scenario::inversion: return "inversion";
    case Scenario::negativity: return "negativity";
    case Scenario::verify: return "verify";
    }
    return "unknown";
}

std::string to_string(Propagator propagator) {
    return propagator == Propagator::analytic ? "analytic" : "numeric";
}

FieldState build_field(const ExperimentConfig& config) {
    const Complex alpha = config.alpha();
    switch (config.state) {
    case FieldKind::coherent: return coherent_state(alpha, config.cutoff);
    case FieldKind::thermal: return thermal_state(config.nbar, config.cutoff);
    case FieldKind::dts: return displaced_thermal(alpha, config.nbar, config.cutoff);
    case FieldKind::mtcs: return mtcs(alpha, config.nbar, config.resolved_q(), config.cutoff);
    case FieldKind::pacs: return pacs(alpha, config.order, config.cutoff);
    case FieldKind::photon_added_dts:
        return photon_add(displaced_thermal(alpha, config.nbar, config.cutoff));
    case FieldKind::photon_added_mtcs:
        return photon_add(mtcs(alpha, config.nbar, config.resolved_q(), config.cutoff));
    }
    throw DomainError("build_field: unknown state kind");
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string render_distribution_csv(const std::vector<double>& distribution) {
    double total = 0.0;
    for (const double p : distribution) {
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw DomainError("distribution does not sum to one: " + format_double(total));
    }
    std::string out = "n,p\n";
    for (std::size_t i = 0; i < distribution.size(); ++i) {
        out += std::to_string(i) + "," + format_double(distribution[i]) + "\n";
    }
    return out;
}

std::string render_series_csv(const TimeSeries& series) {
    std::string out = "lambda_t,inversion,negativity\n";
    double previous = -std::numeric_limits<double>::infinity();
    for (const auto& row : series.rows) {
        if (!(row.lambda_t > previous)) {
            throw DomainError("lambda_t not strictly increasing at " + format_double(row.lambda_t));
        }
        previous = row.lambda_t;
        if (std::abs(row.inversion) > 1.0 + 1e-9) {
            throw DomainError("inversion outside [-1, 1] at lambda_t = " +
                              format_double(row.lambda_t));
        }
        if (row.negativity < -1e-10) {
            throw DomainError("negative negativity at lambda_t = " + format_double(row.lambda_t));
        }
        out += format_double(row.lambda_t) + "," + format_double(row.inversion) + "," +
               format_double(row.negativity) + "\n";
    }
    return out;
}

std::string render_metadata(const ExperimentConfig& c, const FieldState& field) {
    std::string out;
    auto put = [&out](const std::string& key, const std::string& value) {
        out += key + "=" + value + "\n";
    };
    put("command", c.scenario == Scenario::distribution ? "state" : "evolve");
    put("state", to_string(c.state));
    put("alpha_sq", format_double(c.alpha_sq));
    put("theta", format_double(c.theta));
    put("nbar", format_double(c.nbar));
    if (c.q_mode == QMode::explicit_q) {
        put("q", format_double(c.q));
    } else {
        put("equal_overlap", "true");
    }
    put("order", std::to_string(c.order));
    put("cutoff", std::to_string(c.cutoff));
    if (c.scenario != Scenario::distribution) {
        put("t_max", format_double(c.t_max));
        put("steps", std::to_string(c.steps));
        put("propagator", to_string(c.propagator));
        put("observable", to_string(c.scenario));
    }
    put("out", c.output_path);
    put("resolved_q", format_double(c.resolved_q()));
    put("tail_mass", format_double(field.tail_mass));
    put("library_version", library_version());
    return out;
}

std::string render_plot_script(const ExperimentConfig& c) {
    const std::string csv = std::filesystem::path(c.output_path).filename().string();
    std::string title = to_string(c.state) + ", |alpha|^2=" + format_double(c.alpha_sq) +
                        ", nbar=" + format_double(c.nbar);
    std::string body;
    if (c.scenario == Scenario::distribution) {
        body = R"py(n, p = [], []
for row in rows:
    n.append(int(row["n"]))
    p.append(float(row["p"]))
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(n, p, marker=".", linewidth=1)
ax.set_xlabel("n")
ax.set_ylabel("P(n)")
ax.set_xlim(0, max(40, 3 * max(range(len(p)), key=lambda i: p[i])))
)py";
    } else {
        const std::string column = c.scenario == Scenario::negativity ? "negativity" : "inversion";
        const std::string label = c.scenario == Scenario::negativity ? "N(t)" : "W(t)";
        body = "t = [float(r[\"lambda_t\"]) for r in rows]\n"
               "y = [float(r[\"" + column + "\"]) for r in rows]\n"
               "fig, ax = plt.subplots(figsize=(6, 4))\n"
               "ax.plot(t, y, linewidth=0.8)\n"
               "ax.set_xlabel(\"lambda t\")\n"
               "ax.set_ylabel(\"" + label + "\")\n";
    }
    return "#!/usr/bin/env python3\n"
           "# Plots " + csv + "; usage: python3 " + csv + ".plot [image.png]\n"
           "import csv\n"
           "import os\n"
           "import sys\n\n"
           "import matplotlib\n"
           "matplotlib.use(\"Agg\")\n"
           "import matplotlib.pyplot as plt\n\n"
           "here = os.path.dirname(os.path.abspath(__file__))\n"
           "with open(os.path.join(here, \"" + csv + "\"), newline=\"\") as f:\n"
           "    rows = list(csv.DictReader(f))\n" +
           body +
           "ax.set_title(\"" + title + "\")\n"
           "fig.tight_layout()\n"
           "fig.savefig(sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, \"" + csv +
           ".png\"), dpi=150)\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto '" + path.string() + "'");
    }
}

RunSummary run_scenario(const ExperimentConfig& config) {
    if (config.scenario == Scenario::verify) {
        throw UsageError("run_scenario: use verify_suite for the verify scenario");
    }
    if (config.output_path.empty()) {
        throw UsageError("--out: an output path is required");
    }
    const FieldState field = build_field(config);
    std::string csv;
    if (config.scenario == Scenario::distribution) {
        csv = render_distribution_csv(photon_distribution(field));
    } else {
        const auto grid = uniform_grid(config.t_max, config.steps);
        csv = render_series_csv(
            time_series(field, grid, config.propagator, JCParams{}, config.threads));
    }
    const std::filesystem::path out = config.output_path;
    const std::filesystem::path meta = out.string() + ".meta";
    const std::filesystem::path plot = out.string() + ".plot";
    write_file_atomic(out, csv);
    write_file_atomic(meta, render_metadata(config, field));
    write_file_atomic(plot, render_plot_script(config));

    RunSummary summary;
    summary.files = {out, meta, plot};
    summary.resolved_q = config.resolved_q();
    summary.tail_mass = field.tail_mass;
    return summary;
}

// ---------------------------------------------------------------------------
// Verification suite

bool VerificationReport::passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

namespace {

struct Check {
    std::string criterion;
    std::string name;
    double bound;
    Comparison comparison;
    std::function<double()> measure;
};

bool satisfied(double measured, double bound, Comparison cmp) {
    switch (cmp) {
    case Comparison::at_most: return measured <= bound;
    case Comparison::greater_than: return measured > bound;
    case Comparison::equals: return measured == bound;
    }
    return false;
}

double max_entry_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return max_abs(a - b);
}

// Builds states once per cutoff and shares them across checks.
class VerifyContext {
public:
    explicit VerifyContext(const VerifyOptions& options) : options_(options) {}

    std::size_t cutoff() const { return options_.cutoff; }
    const VerifyOptions& options() const { return options_; }

    const FieldState& dts(double a2, double nbar) {
        return cached(dts_, {a2, nbar}, [&] {
            return displaced_thermal(std::sqrt(a2), nbar, cutoff());
        });
    }
    const FieldState& mtcs_equal(double a2, double nbar) {
        return cached(mtcs_, {a2, nbar}, [&] {
            return mtcs(std::sqrt(a2), nbar, equal_overlap_q(std::sqrt(a2), nbar), cutoff());
        });
    }
    std::vector<double> inversion(const FieldState& field) {
        return inversion_series(field, grid_);
    }
    std::span<const double> grid() const { return grid_; }

private:
    using Key = std::pair<double, double>;
    template <typename Make>
    const FieldState& cached(std::map<Key, FieldState>& cache, Key key, Make make) {
        auto it = cache.find(key);
        if (it == cache.end()) {
            it = cache.emplace(key, make()).first;
        }
        return it->second;
    }

    VerifyOptions options_;
    std::map<Key, FieldState> dts_;
    std::map<Key, FieldState> mtcs_;
    std::vector<double> grid_ = uniform_grid(kDefaultTMax, kDefaultSteps);
};

std::vector<Check> build_checks(VerifyContext& ctx) {
    const double a2 = 10.0;
    const Complex alpha = std::sqrt(a2);
    std::vector<Check> checks;

    checks.push_back({"C1", "dts_triple_construction", 1e-8, Comparison::at_most, [&ctx, alpha] {
        const auto u = displaced_thermal(alpha, 1.0, ctx.cutoff(), DtsMethod::unitary);
        const auto d = displaced_thermal(alpha, 1.0, ctx.cutoff(), DtsMethod::displaced_number);
        const auto p = displaced_thermal(alpha, 1.0, ctx.cutoff(), DtsMethod::pacs_mixture);
        return std::max({max_entry_diff(u.rho, d.rho), max_entry_diff(u.rho, p.rho),
                         max_entry_diff(d.rho, p.rho)});
    }});

    checks.push_back({"C2", "equal_overlap_q_near_half", 0.01, Comparison::at_most, [alpha] {
        return std::abs(equal_overlap_q(alpha, 1.0) - 0.5);
    }});
    checks.push_back({"C2", "mtcs_equal_overlap", 1e-9, Comparison::at_most, [&ctx, alpha] {
        return std::abs(coherent_overlap(ctx.mtcs_equal(10.0, 1.0), alpha) - 0.5);
    }});

    checks.push_back({"C3", "dts_mixedness_closed_form", 1e-9, Comparison::at_most, [&ctx] {
        double worst = 0.0;
        for (const double s : {1.0, 10.0}) {
            for (const double nb : {0.1, 1.0}) {
                const double exact = 2.0 * nb / (1.0 + 2.0 * nb);
                worst = std::max(worst, std::abs(purity_deficit(ctx.dts(s, nb)) - exact));
            }
        }
        return worst;
    }});
    checks.push_back({"C3", "mtcs_mixedness_closed_form", 1e-9, Comparison::at_most, [&ctx] {
        double worst = 0.0;
        for (const double s : {1.0, 10.0}) {
            for (const double nb : {0.1, 1.0}) {
                const double q = equal_overlap_q(std::sqrt(s), nb);
                const double exact = 1.0 - q * q - (1.0 - q) * (1.0 - q) / (1.0 + 2.0 * nb) -
                                     2.0 * q * (1.0 - q) * std::exp(-s / (1.0 + nb)) / (1.0 + nb);
                worst = std::max(worst, std::abs(purity_deficit(ctx.mtcs_equal(s, nb)) - exact));
            }
        }
        return worst;
    }});
    checks.push_back({"C3", "dts_mixedness_alpha_independent", 1e-9, Comparison::at_most, [&ctx] {
        double worst = 0.0;
        for (const double nb : {0.1, 1.0}) {
            worst = std::max(worst, std::abs(purity_deficit(ctx.dts(1.0, nb)) -
                                             purity_deficit(ctx.dts(10.0, nb))));
        }
        return worst;
    }});

    checks.push_back({"C4", "vacuum_rabi_inversion", 1e-8, Comparison::at_most, [&ctx] {
        const RabiIndexing indexing = ctx.options().perturb == "rabi-sqrt-n"
                                          ? RabiIndexing::unshifted
                                          : RabiIndexing::shifted;
        const auto vacuum = number_state(0, ctx.cutoff());
        const auto w = inversion_series(vacuum, ctx.grid(), Propagator::analytic, {}, indexing);
        double worst = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            worst = std::max(worst, std::abs(w[i] - std::cos(2.0 * ctx.grid()[i])));
        }
        return worst;
    }});

    checks.push_back({"C5", "analytic_vs_numeric_trace_distance", 1e-8, Comparison::at_most,
                      [alpha] {
        // Both propagators act on the same 60-level truncation of fields
        // built at the default cutoff.
        constexpr std::size_t dim = 60;
        const double q = equal_overlap_q(alpha, 1.0);
        const FieldState d = displaced_thermal(alpha, 1.0, kDefaultCutoff);
        const FieldState m = mtcs(alpha, 1.0, q, kDefaultCutoff);
        std::vector<FieldState> fields;
        for (const auto& f : {d, m, photon_add(d), photon_add(m)}) {
            fields.push_back(truncate_field(f, dim));
        }
        double worst = 0.0;
        for (const auto& f : fields) {
            const JointState initial = initial_joint_state(f);
            for (const double t : {5.0, 15.0, 25.0}) {
                worst = std::max(worst, trace_distance(evolve_analytic(f, t).rho,
                                                       evolve_numeric(initial, {}, t).rho));
            }
        }
        return worst;
    }});

    checks.push_back({"C6", "vacuum_negativity_at_pi_over_4", 1e-8, Comparison::at_most, [&ctx] {
        const auto state = evolve_analytic(number_state(0, ctx.cutoff()), std::numbers::pi / 4.0);
        return std::abs(negativity(state) - 0.5);
    }});
    checks.push_back({"C6", "product_state_negativity", 1e-10, Comparison::at_most, [&ctx, alpha] {
        const std::size_t n = ctx.cutoff();
        const std::vector<FieldState> fields = {
            number_state(0, n),       coherent_state(alpha, n), thermal_state(1.0, n),
            ctx.dts(10.0, 1.0),       ctx.mtcs_equal(10.0, 1.0), pacs(alpha, 1, n),
            photon_add(ctx.dts(10.0, 1.0)), photon_add(ctx.mtcs_equal(10.0, 1.0))};
        double worst = 0.0;
        for (const auto& f : fields) {
            worst = std::max(worst, negativity(initial_joint_state(f)));
        }
        return worst;
    }});

    auto contrast = [&ctx](const FieldState& f) {
        return revival_contrast(ctx.grid(), ctx.inversion(f), kRevivalWindowLo, kRevivalWindowHi);
    };
    checks.push_back({"C7", "contrast_dts_exceeds_mtcs_nbar1", 0.0, Comparison::greater_than,
                      [&ctx, contrast] {
        return contrast(ctx.dts(10.0, 1.0)) - contrast(ctx.mtcs_equal(10.0, 1.0));
    }});
    checks.push_back({"C7", "contrast_mtcs_nbar01_exceeds_nbar1", 0.0, Comparison::greater_than,
                      [&ctx, contrast] {
        return contrast(ctx.mtcs_equal(10.0, 0.1)) - contrast(ctx.mtcs_equal(10.0, 1.0));
    }});
    checks.push_back({"C7", "contrast_mtcs_nbar0_exceeds_nbar01", 0.0, Comparison::greater_than,
                      [&ctx, contrast] {
        return contrast(ctx.mtcs_equal(10.0, 0.0)) - contrast(ctx.mtcs_equal(10.0, 0.1));
    }});

    checks.push_back({"C8", "contrast_photon_added_mtcs_exceeds_mtcs", 0.0,
                      Comparison::greater_than, [&ctx, contrast] {
        const auto& m = ctx.mtcs_equal(10.0, 1.0);
        return contrast(photon_add(m)) - contrast(m);
    }});
    checks.push_back({"C8", "photon_added_closer_to_noise_free", 0.0, Comparison::greater_than,
                      [&ctx, contrast] {
        const auto& m = ctx.mtcs_equal(10.0, 1.0);
        const double c0 = contrast(ctx.mtcs_equal(10.0, 0.0));
        return std::abs(contrast(m) - c0) - std::abs(contrast(photon_add(m)) - c0);
    }});

    checks.push_back({"C9", "photon_added_vacuum_weight", 1e-14, Comparison::at_most, [&ctx] {
        double worst = 0.0;
        for (const double nb : {0.0, 0.1, 1.0}) {
            worst = std::max(worst, std::abs(photon_add(ctx.dts(10.0, nb)).rho(0, 0)));
            worst = std::max(worst, std::abs(photon_add(ctx.mtcs_equal(10.0, nb)).rho(0, 0)));
        }
        return worst;
    }});
    checks.push_back({"C9", "dts_photon_add_normalizer", 1e-9, Comparison::at_most, [&ctx] {
        double worst = 0.0;
        for (const double nb : {0.1, 1.0}) {
            const double expected = 1.0 + nb + 10.0;
            worst = std::max(worst, std::abs(photon_add_normalizer(ctx.dts(10.0, nb)) - expected));
        }
        return worst;
    }});
    checks.push_back({"C9", "mtcs_photon_add_normalizer", 1e-9, Comparison::at_most, [&ctx] {
        double worst = 0.0;
        for (const double nb : {0.1, 1.0}) {
            const double q = equal_overlap_q(std::sqrt(10.0), nb);
            const double expected = 1.0 + (1.0 - q) * nb + q * 10.0;
            worst = std::max(worst,
                             std::abs(photon_add_normalizer(ctx.mtcs_equal(10.0, nb)) - expected));
        }
        return worst;
    }});

    checks.push_back({"C10", "mtcs_two_peaks_one_at_vacuum", 2.0, Comparison::equals,
                      [&ctx, alpha] {
        const auto peaks = local_maxima(photon_distribution(mtcs(alpha, 1.0, 0.5, ctx.cutoff())));
        if (peaks.empty() || peaks.front() != 0) {
            return -1.0;
        }
        return static_cast<double>(peaks.size());
    }});
    checks.push_back({"C10", "dts_single_peak", 1.0, Comparison::equals, [&ctx] {
        return static_cast<double>(local_maxima(photon_distribution(ctx.dts(10.0, 1.0))).size());
    }});

    checks.push_back({"C11", "sidecar_rerun_byte_identical", 1.0, Comparison::equals, [&ctx] {
        std::filesystem::path dir = ctx.options().scratch_dir;
        const bool own_dir = dir.empty();
        if (own_dir) {
            dir = std::filesystem::temp_directory_path() /
                  ("jcnoise_verify_" + std::to_string(::getpid()));
        }
        std::filesystem::create_directories(dir);
        const auto first = (dir / "first.csv").string();
        const auto second = (dir / "second.csv").string();
        const auto cfg = parse_config({"evolve", "--state", "photon_added_mtcs", "--alpha-sq", "10",
                                       "--nbar", "1", "--equal-overlap", "--cutoff", "60",
                                       "--t-max", "5", "--steps", "21", "--out", first})
                             .config;
        run_scenario(cfg);
        const auto rerun = parse_config({"evolve", "--config", first + ".meta", "--out", second});
        run_scenario(rerun.config);
        auto slurp = [](const std::string& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        const bool same = slurp(first) == slurp(second);
        std::error_code ec;
        if (own_dir) {
            std::filesystem::remove_all(dir, ec);
        }
        return same ? 1.0 : 0.0;
    }});

    return checks;
}

} // namespace

VerificationReport verify_suite(const VerifyOptions& options) {
    if (!options.perturb.empty() && options.perturb != "rabi-sqrt-n") {
        throw UsageError("--debug-perturb: unknown perturbation '" + options.perturb + "'");
    }
    VerifyContext ctx(options);
    VerificationReport report;
    for (auto& check : build_checks(ctx)) {
        CheckResult r;
        r.criterion = check.criterion;
        r.name = check.name;
        r.bound = check.bound;
        r.comparison = check.comparison;
        try {
            r.measured = check.measure();
            r.status = satisfied(r.measured, r.bound, r.comparison) ? CheckStatus::pass
                                                                    : CheckStatus::fail;
        } catch (const CutoffTooSmall& e) {
            r.status = CheckStatus::skip;
            r.note = "skipped: cutoff " + std::to_string(options.cutoff) +
                     " too small (needs about " + std::to_string(e.suggested_cutoff()) + ")";
        } catch (const std::exception& e) {
            r.status = CheckStatus::fail;
            r.note = std::string("error: ") + e.what();
        }
        report.checks.push_back(std::move(r));
    }
    return report;
}

std::string render_report(const VerificationReport& report) {
    std::string out;
    out += "jcnoise verify (library " + library_version() + ")\n";
    std::size_t failed = 0;
    std::size_t skipped = 0;
    for (const auto& c : report.checks) {
        const char* status = c.status == CheckStatus::pass   ? "PASS"
                             : c.status == CheckStatus::fail ? "FAIL"
                                                             : "SKIP";
        const char* cmp = c.comparison == Comparison::at_most        ? "<="
                          : c.comparison == Comparison::greater_than ? ">"
                                                                     : "==";
        char line[256];
        std::snprintf(line, sizeof line, "%-4s %-5s %-40s measured=%s  required %s %s", status,
                      c.criterion.c_str(), c.name.c_str(), format_short(c.measured).c_str(), cmp,
                      format_short(c.bound).c_str());
        out += line;
        if (!c.note.empty()) {
            out += "  [" + c.note + "]";
        }
        out += "\n";
        failed += c.status == CheckStatus::fail;
        skipped += c.status == CheckStatus::skip;
    }
    out += "summary: " + std::to_string(report.checks.size()) + " checks, " +
           std::to_string(failed) + " failed, " + std::to_string(skipped) + " skipped\n";
    return out;
}

} // namespace jcnoise
