// lerayflow: pseudo-spectral 2D incompressible flow toolkit.
//
// Subcommands:
//   simulate  run a configured simulation, write NSSNAP01 snapshots
//   diagnose  evaluate norms/criticality/regime diagnostics over snapshots
//   sweep     run a Reynolds sweep, write CSV + log-log SVG with fit
//   fit       power-law fit of (re, tau_trans) from CSV or the synthetic
//             generator, JSON result on stdout
//   report    diagnostics CSV plus a regime strip-chart SVG
//
// Exit codes: 0 success, 2 user/config error, 3 runtime/solver failure.

#include <glob.h>
#include <sys/stat.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "leray/leray.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUser = 2;
constexpr int kExitRuntime = 3;

struct GlobalOpts {
    int jobs = 0; // 0 = auto (hardware concurrency)
    std::optional<uint64_t> seed;
    bool no_timestamp = false;
    bool quiet = false;

    int effective_jobs() const {
        if (jobs > 0) return jobs;
        unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }
    std::string timestamp() const { return no_timestamp ? "" : leray::iso_utc_now(); }
    void note(const std::string& msg) const {
        if (!quiet) std::cerr << msg << "\n";
    }
};

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw leray::ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw leray::ConfigError("cannot create output directory '" + dir + "'");
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::string snapshot_name(size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06zu.bin", index);
    return buf;
}

/// Expand a directory (all snap_*.bin inside) or a glob pattern into a
/// sorted path list.
std::vector<std::string> expand_inputs(const std::string& pattern) {
    std::string effective = pattern;
    struct stat st{};
    if (::stat(pattern.c_str(), &st) == 0 && S_ISDIR(st.st_mode))
        effective = join_path(pattern, "snap_*.bin");

    glob_t g{};
    std::vector<std::string> paths;
    int rc = ::glob(effective.c_str(), 0, nullptr, &g);
    if (rc == 0) {
        for (size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
    }
    ::globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH)
        throw leray::ConfigError("glob failed for pattern '" + effective + "'");
    std::sort(paths.begin(), paths.end());
    return paths;
}

leray::Timeline load_timeline(const std::string& input, const std::string& params_path) {
    leray::Timeline tl;
    if (!params_path.empty())
        tl.params = leray::flow_params_from_json(
            nlohmann::json::parse(read_file_or_throw(params_path)));
    std::vector<std::string> paths = expand_inputs(input);
    if (paths.empty()) throw leray::ConfigError("no snapshot files matched '" + input + "'");
    for (const std::string& p : paths) tl.snapshots.push_back(leray::snapshot_read(p));
    leray::validate_timeline(tl);
    return tl;
}

int run_simulate(const GlobalOpts& opts, const std::string& config_path,
                 const std::string& out_dir) {
    leray::SolverConfig config = leray::solver_config_from_json_text(read_file_or_throw(config_path));
    if (opts.seed && config.initial_condition.kind == leray::InitialCondition::Kind::RandomShear)
        config.initial_condition.seed = *opts.seed;
    ensure_dir(out_dir);

    leray::RunManifest manifest;
    manifest.command = "simulate";
    manifest.config_digest = leray::fnv1a_hex(leray::solver_config_to_json(config).dump());
    manifest.started_at = opts.timestamp();

    auto writer = [&](const leray::Snapshot& s, size_t index) {
        std::string name = snapshot_name(index);
        leray::snapshot_write(s, join_path(out_dir, name));
        manifest.outputs.push_back(name);
    };
    try {
        leray::Timeline tl = leray::simulate(config, writer);
        leray::LerayCheck check = leray::leray_membership(tl);
        if (!check.ok()) throw leray::BlowUpError(tl.snapshots.back().time);
        manifest.finished_at = opts.timestamp();
        manifest.outputs.push_back("manifest.json");
        leray::manifest_write(manifest, join_path(out_dir, "manifest.json"));
        opts.note("wrote " + std::to_string(tl.snapshots.size()) + " snapshots to " + out_dir);
        return kExitOk;
    } catch (const leray::BlowUpError& e) {
        manifest.status = "blow_up";
        manifest.failure_time = e.time();
        manifest.finished_at = opts.timestamp();
        manifest.outputs.push_back("manifest.json");
        leray::manifest_write(manifest, join_path(out_dir, "manifest.json"));
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int run_diagnose(const GlobalOpts& opts, const std::string& input, const std::string& params_path,
                 const std::string& out_path) {
    leray::Timeline tl = load_timeline(input, params_path);
    std::string csv = leray::diagnostics_csv(leray::compute_diagnostics(tl));
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        leray::write_text_file(out_path, csv);
        opts.note("wrote " + out_path);
    }
    return kExitOk;
}

int run_sweep(const GlobalOpts& opts, const std::string& config_path, const std::string& out_dir) {
    leray::SweepConfig config = leray::sweep_config_from_json_text(read_file_or_throw(config_path));
    if (opts.seed &&
        config.solver.initial_condition.kind == leray::InitialCondition::Kind::RandomShear)
        config.solver.initial_condition.seed = *opts.seed;
    ensure_dir(out_dir);

    leray::RunManifest manifest;
    manifest.command = "sweep";
    manifest.config_digest = leray::fnv1a_hex(leray::sweep_config_to_json(config).dump());
    manifest.started_at = opts.timestamp();

    std::vector<leray::SweepRow> rows = leray::reynolds_sweep(config, opts.effective_jobs());
    leray::write_text_file(join_path(out_dir, "sweep.csv"), leray::sweep_csv(rows));
    manifest.outputs.push_back("sweep.csv");

    auto points = leray::fit_points_from_rows(rows);
    std::optional<leray::FitResult> fit;
    if (points.size() >= 2) {
        fit = leray::powerlaw_fit(points);
        if (fit->few_points_warning)
            std::cerr << "warning: fit used only " << fit->n_points << " points\n";
    } else {
        std::cerr << "warning: fewer than 2 transitions detected; fit skipped\n";
    }
    leray::write_text_file(join_path(out_dir, "sweep.svg"),
                           leray::svg_powerlaw_plot(rows, fit, opts.timestamp()));
    manifest.outputs.push_back("sweep.svg");

    bool any_hit = false;
    for (const leray::SweepRow& r : rows) any_hit = any_hit || r.hit;
    manifest.status = any_hit ? "ok" : "all_runs_failed";
    manifest.finished_at = opts.timestamp();
    manifest.outputs.push_back("manifest.json");
    leray::manifest_write(manifest, join_path(out_dir, "manifest.json"));
    if (!any_hit) {
        std::cerr << "error: no sweep run reached the transition threshold\n";
        return kExitRuntime;
    }
    opts.note("wrote sweep results to " + out_dir);
    return kExitOk;
}

struct SynthOpts {
    double k1 = 0.0; // 0 = synth mode off
    double noise_rel = 0.01;
    int points = 20;
    double re_min = 1e3;
    double re_max = 1e5;
};

int run_fit(const GlobalOpts& opts, const std::string& csv_path, const SynthOpts& synth) {
    std::vector<std::pair<double, double>> points;
    if (synth.k1 > 0.0) {
        points = leray::synth_sk_dataset(synth.k1, synth.noise_rel,
                                         leray::log_spaced(synth.re_min, synth.re_max,
                                                           synth.points),
                                         opts.seed.value_or(20260826));
    } else if (!csv_path.empty()) {
        points = leray::fit_points_from_rows(
            leray::sweep_rows_from_csv(leray::csv_parse_file(csv_path)));
    } else {
        throw leray::ConfigError("fit needs a CSV path or --synth-k1");
    }
    leray::FitResult fit = leray::powerlaw_fit(points);
    if (fit.few_points_warning && !opts.quiet)
        std::cerr << "warning: fit used only " << fit.n_points << " points\n";
    std::cout << leray::fit_result_to_json(fit).dump(2) << "\n";
    return kExitOk;
}

int run_report(const GlobalOpts& opts, const std::string& input, const std::string& params_path,
               const std::string& out_dir) {
    leray::Timeline tl = load_timeline(input, params_path);
    ensure_dir(out_dir);

    leray::RunManifest manifest;
    manifest.command = "report";
    {
        std::string ident = params_path.empty() ? std::string("defaults")
                                                : read_file_or_throw(params_path);
        manifest.config_digest = leray::fnv1a_hex(ident + "|" + input);
    }
    manifest.started_at = opts.timestamp();

    std::vector<leray::DiagnosticRecord> records = leray::compute_diagnostics(tl);
    leray::write_text_file(join_path(out_dir, "report.csv"), leray::diagnostics_csv(records));
    manifest.outputs.push_back("report.csv");
    leray::write_text_file(join_path(out_dir, "regime.svg"),
                           leray::svg_regime_strip(records, opts.timestamp()));
    manifest.outputs.push_back("regime.svg");

    manifest.finished_at = opts.timestamp();
    manifest.outputs.push_back("manifest.json");
    leray::manifest_write(manifest, join_path(out_dir, "manifest.json"));
    opts.note("wrote report to " + out_dir);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D incompressible flow transition toolkit"};
    app.set_version_flag("--version", std::string(leray::kToolName) + " " + leray::kToolVersion);
    app.require_subcommand(1);

    GlobalOpts opts;
    app.add_option("--jobs", opts.jobs, "Worker threads for sweeps (0 = all cores)");
    uint64_t seed_value = 0;
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_value, "Override the RNG seed (shear init, synth data)");
    app.add_flag("--no-timestamp", opts.no_timestamp, "Omit timestamps from SVG/manifest output");
    app.add_flag("--quiet", opts.quiet, "Suppress progress notes on stderr");

    std::string config_path, out_dir, input, params_path, out_path, csv_path;
    SynthOpts synth;

    CLI::App* sim = app.add_subcommand("simulate", "Run a simulation from a JSON config");
    sim->add_option("config", config_path, "Solver config JSON")->required();
    sim->add_option("--out-dir", out_dir, "Output directory")->required();

    CLI::App* diag = app.add_subcommand("diagnose", "Diagnostics CSV from snapshot files");
    diag->add_option("input", input, "Snapshot directory or glob")->required();
    diag->add_option("--params", params_path, "Flow parameters JSON");
    diag->add_option("--out", out_path, "Write CSV here instead of stdout");

    CLI::App* swp = app.add_subcommand("sweep", "Reynolds sweep: CSV + log-log SVG");
    swp->add_option("config", config_path, "Sweep config JSON")->required();
    swp->add_option("--out-dir", out_dir, "Output directory")->required();

    CLI::App* fit = app.add_subcommand("fit", "Power-law fit; JSON on stdout");
    fit->add_option("csv", csv_path, "Sweep CSV with re and tau_trans columns");
    fit->add_option("--synth-k1", synth.k1, "Generate synthetic data with this prefactor");
    fit->add_option("--synth-noise", synth.noise_rel, "Synthetic lognormal noise level");
    fit->add_option("--synth-points", synth.points, "Synthetic point count");
    fit->add_option("--synth-re-min", synth.re_min, "Synthetic Re range lower end");
    fit->add_option("--synth-re-max", synth.re_max, "Synthetic Re range upper end");

    CLI::App* rep = app.add_subcommand("report", "Diagnostics CSV + regime strip chart");
    rep->add_option("input", input, "Snapshot directory or glob")->required();
    rep->add_option("--params", params_path, "Flow parameters JSON");
    rep->add_option("--out-dir", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUser;
    }
    if (seed_opt->count() > 0) opts.seed = seed_value;

    try {
        if (sim->parsed()) return run_simulate(opts, config_path, out_dir);
        if (diag->parsed()) return run_diagnose(opts, input, params_path, out_path);
        if (swp->parsed()) return run_sweep(opts, config_path, out_dir);
        if (fit->parsed()) return run_fit(opts, csv_path, synth);
        if (rep->parsed()) return run_report(opts, input, params_path, out_dir);
        std::cerr << "error: no subcommand\n";
        return kExitUser;
    } catch (const leray::BlowUpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const leray::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUser;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
