#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "leray/csv.hpp"
#include "leray/diagnostics.hpp"
#include "leray/errors.hpp"
#include "leray/field.hpp"
#include "leray/initial.hpp"
#include "leray/rng.hpp"
#include "leray/solver.hpp"
#include "leray/timeline.hpp"

namespace leray {

struct Timescales {
    double t_c = 0.0;  // convective time L/U
    double t_nu = 0.0; // viscous diffusion time L^2/nu
    double re = 0.0;   // Reynolds number UL/nu = t_nu/t_c
};

inline Timescales timescales(const FlowParams& params) {
    params.validate();
    Timescales t;
    t.t_c = params.l_char / params.u_char;
    t.t_nu = params.l_char * params.l_char / params.nu;
    t.re = params.u_char * params.l_char / params.nu;
    return t;
}

struct TransitionResult {
    double t_trans = 0.0;   // first crossing time of the decay indicator
    double tau_trans = 0.0; // t_trans / t_c
    double re = 0.0;
    bool hit = false;
    std::string method = "threshold_crossing";
};

/// First time the H1 decay indicator falls to theta, linearly interpolated
/// in the indicator between the bracketing snapshots. hit = false when the
/// timeline never crosses.
inline TransitionResult detect_transition_time(const Timeline& tl, double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw DomainError("transition threshold theta must lie in (0, 1]");
    validate_timeline(tl);
    double ref = h1_norm_sq(tl.snapshots.front().velocity);
    if (!(ref > 0.0))
        throw UndefinedReferenceError("initial H1 norm is zero; transition undefined");

    TransitionResult result;
    result.re = timescales(tl.params).re;
    double t_c = timescales(tl.params).t_c;

    double prev_ind = 1.0, prev_t = tl.snapshots.front().time;
    for (size_t k = 0; k < tl.snapshots.size(); ++k) {
        const Snapshot& s = tl.snapshots[k];
        double ind =
            std::clamp(std::sqrt(h1_norm_sq(s.velocity) / ref), 0.0, 1.0);
        if (ind <= theta) {
            double t_star;
            if (k == 0 || prev_ind == ind) {
                t_star = s.time;
            } else {
                t_star = prev_t + (theta - prev_ind) * (s.time - prev_t) / (ind - prev_ind);
            }
            result.t_trans = t_star;
            result.tau_trans = t_star / t_c;
            result.hit = true;
            return result;
        }
        prev_ind = ind;
        prev_t = s.time;
    }
    return result; // hit = false
}

struct SweepRow {
    double re = 0.0;
    double nu = 0.0;
    std::optional<double> t_trans;
    std::optional<double> tau_trans;
    bool hit = false;
};

struct SweepConfig {
    std::vector<double> re_values;
    double theta = 0.5;
    enum class Vary { Nu, UChar } vary = Vary::Nu;
    enum class Mode { Simulate, Analytic } mode = Mode::Simulate;
    SolverConfig solver; // per-run template; nu (or u_char) is overridden per Re

    void validate() const {
        if (re_values.empty()) throw ConfigError("sweep needs a non-empty re_values list");
        for (double re : re_values)
            if (!(re > 0.0) || !std::isfinite(re))
                throw ConfigError("sweep re_values must be finite and > 0");
        if (!(theta > 0.0 && theta <= 1.0)) throw ConfigError("sweep theta must lie in (0, 1]");
        if (mode == Mode::Analytic &&
            solver.initial_condition.kind != InitialCondition::Kind::TaylorGreen)
            throw ConfigError("analytic sweep mode requires a taylor_green initial condition");
        solver.validate();
    }
};

inline nlohmann::json sweep_config_to_json(const SweepConfig& c) {
    nlohmann::json j;
    j["re_values"] = c.re_values;
    j["theta"] = c.theta;
    j["vary"] = c.vary == SweepConfig::Vary::Nu ? "nu" : "u_char";
    j["mode"] = c.mode == SweepConfig::Mode::Simulate ? "simulate" : "analytic";
    j["solver"] = solver_config_to_json(c.solver);
    return j;
}

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
    detail::expect_object(j, "sweep config");
    detail::reject_unknown_keys(j, "sweep config",
                                {"re_values", "theta", "vary", "mode", "solver"});
    SweepConfig c;
    if (!j.contains("re_values")) throw ConfigError("sweep config needs 're_values'");
    detail::read_key(j, "re_values", c.re_values, "sweep config");
    detail::read_key(j, "theta", c.theta, "sweep config");
    if (j.contains("vary")) {
        std::string v;
        detail::read_key(j, "vary", v, "sweep config");
        if (v == "nu")
            c.vary = SweepConfig::Vary::Nu;
        else if (v == "u_char")
            c.vary = SweepConfig::Vary::UChar;
        else
            throw ConfigError("sweep 'vary' must be \"nu\" or \"u_char\"");
    }
    if (j.contains("mode")) {
        std::string m;
        detail::read_key(j, "mode", m, "sweep config");
        if (m == "simulate")
            c.mode = SweepConfig::Mode::Simulate;
        else if (m == "analytic")
            c.mode = SweepConfig::Mode::Analytic;
        else
            throw ConfigError("sweep 'mode' must be \"simulate\" or \"analytic\"");
    }
    if (j.contains("solver")) c.solver = solver_config_from_json(j.at("solver"));
    c.validate();
    return c;
}

inline SweepConfig sweep_config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("sweep config is not valid JSON: ") + e.what());
    }
    return sweep_config_from_json(j);
}

namespace detail {

/// Per-Re solver configuration: Re is varied through nu (default) or
/// through u_char at fixed nu. Varying u_char also rescales the initial
/// amplitude so the realized flow actually carries the new velocity scale.
inline SolverConfig configure_for_re(const SweepConfig& sweep, double re) {
    SolverConfig run = sweep.solver;
    if (sweep.vary == SweepConfig::Vary::Nu) {
        run.params.nu = run.params.u_char * run.params.l_char / re;
    } else {
        run.params.u_char = re * run.params.nu / run.params.l_char;
        if (run.initial_condition.kind != InitialCondition::Kind::File)
            run.initial_condition.amplitude = run.params.u_char;
    }
    return run;
}

/// Analytic decaying-vortex timeline sampled on the configured snapshot
/// grid; the closed-form path for sweeps where no numerical run is wanted.
inline Timeline analytic_timeline(const SolverConfig& config) {
    Timeline tl;
    tl.params = config.params;
    for (double t : snapshot_times(config.snapshot_interval, config.t_end))
        tl.snapshots.push_back(analytic_taylor_green(
            config.grid, config.initial_condition.amplitude, config.params.nu, t));
    return tl;
}

inline SweepRow sweep_one(const SweepConfig& sweep, double re) {
    SolverConfig run = detail::configure_for_re(sweep, re);
    SweepRow row;
    row.re = re;
    row.nu = run.params.nu;
    try {
        Timeline tl = sweep.mode == SweepConfig::Mode::Analytic ? analytic_timeline(run)
                                                                : simulate(run);
        TransitionResult tr = detect_transition_time(tl, sweep.theta);
        if (tr.hit) {
            row.t_trans = tr.t_trans;
            row.tau_trans = tr.tau_trans;
            row.hit = true;
        }
    } catch (const BlowUpError&) {
        row.hit = false; // blow-up is data, not a crash
    }
    return row;
}

} // namespace detail

/// One run per Reynolds value; rows sorted by Re. Runs are independent and
/// execute on up to `jobs` threads with a deterministic result order.
inline std::vector<SweepRow> reynolds_sweep(const SweepConfig& config, int jobs = 1) {
    config.validate();
    std::vector<double> re_sorted = config.re_values;
    std::sort(re_sorted.begin(), re_sorted.end());
    std::vector<SweepRow> rows(re_sorted.size());

    jobs = std::max(1, jobs);
    jobs = std::min<int>(jobs, static_cast<int>(re_sorted.size()));
    if (jobs == 1) {
        for (size_t i = 0; i < re_sorted.size(); ++i)
            rows[i] = detail::sweep_one(config, re_sorted[i]);
        return rows;
    }

    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(jobs));
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < re_sorted.size(); i = next.fetch_add(1))
                rows[i] = detail::sweep_one(config, re_sorted[i]);
        });
    for (std::thread& th : workers) th.join();
    return rows;
}

/// Fixed-order sweep CSV; rows that never crossed carry empty time cells.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "re,nu,t_trans,tau_trans,hit\n";
    for (const SweepRow& r : rows) {
        out += csv_join({format_double(r.re), format_double(r.nu),
                         r.t_trans ? format_double(*r.t_trans) : "",
                         r.tau_trans ? format_double(*r.tau_trans) : "",
                         r.hit ? "true" : "false"});
    }
    return out;
}

/// Rows parsed back from a sweep CSV (columns located by header name);
/// rows with hit=false or empty cells are preserved as misses.
inline std::vector<SweepRow> sweep_rows_from_csv(const CsvTable& table) {
    int c_re = table.column("re");
    int c_tau = table.column("tau_trans");
    if (c_re < 0 || c_tau < 0)
        throw FormatError("sweep CSV needs 're' and 'tau_trans' columns");
    int c_nu = table.column("nu");
    int c_t = table.column("t_trans");
    int c_hit = table.column("hit");
    std::vector<SweepRow> rows;
    for (const auto& cells : table.rows) {
        SweepRow r;
        r.re = parse_double(cells[static_cast<size_t>(c_re)], "re");
        if (c_nu >= 0 && !cells[static_cast<size_t>(c_nu)].empty())
            r.nu = parse_double(cells[static_cast<size_t>(c_nu)], "nu");
        const std::string& tau_cell = cells[static_cast<size_t>(c_tau)];
        bool hit = true;
        if (c_hit >= 0) {
            const std::string& h = cells[static_cast<size_t>(c_hit)];
            hit = (h == "true" || h == "1");
        }
        if (hit && !tau_cell.empty()) {
            r.tau_trans = parse_double(tau_cell, "tau_trans");
            if (c_t >= 0 && !cells[static_cast<size_t>(c_t)].empty())
                r.t_trans = parse_double(cells[static_cast<size_t>(c_t)], "t_trans");
            r.hit = true;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

struct FitResult {
    double exponent = 0.0;
    double prefactor_k1 = 0.0;
    double r_squared = 0.0;
    long n_points = 0;
    double residual_std = 0.0;
    bool few_points_warning = false; // fewer than 5 valid points
};

/// Ordinary least squares of log(tau) on log(re): exponent = slope,
/// prefactor = exp(intercept), R^2 in log space.
inline FitResult powerlaw_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2)
        throw InsufficientDataError("power-law fit needs at least 2 points, got " +
                                    std::to_string(points.size()));
    std::vector<double> lx(points.size()), ly(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        auto [re, tau] = points[i];
        if (!(re > 0.0) || !(tau > 0.0) || !std::isfinite(re) || !std::isfinite(tau))
            throw DomainError("power-law fit needs finite positive (re, tau) pairs");
        lx[i] = std::log(re);
        ly[i] = std::log(tau);
    }
    double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        double dx = lx[i] - mx, dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0))
        throw DegenerateDesignError("power-law fit needs at least two distinct re values");

    FitResult fit;
    fit.exponent = sxy / sxx;
    fit.prefactor_k1 = std::exp(my - fit.exponent * mx);
    // Sum the squared residuals directly; the one-pass form
    // syy - sxy^2/sxx cancels catastrophically for near-exact data.
    double ss_res = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
        double r = (ly[i] - my) - fit.exponent * (lx[i] - mx);
        ss_res += r * r;
    }
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.n_points = static_cast<long>(points.size());
    fit.residual_std = (points.size() > 2)
                           ? std::sqrt(ss_res / (n - 2.0))
                           : 0.0;
    fit.few_points_warning = points.size() < 5;
    return fit;
}

inline std::vector<std::pair<double, double>> fit_points_from_rows(
    const std::vector<SweepRow>& rows) {
    std::vector<std::pair<double, double>> points;
    for (const SweepRow& r : rows)
        if (r.hit && r.tau_trans) points.emplace_back(r.re, *r.tau_trans);
    return points;
}

inline nlohmann::json fit_result_to_json(const FitResult& fit) {
    return nlohmann::json{{"exponent", fit.exponent},
                          {"prefactor_k1", fit.prefactor_k1},
                          {"r_squared", fit.r_squared},
                          {"n_points", fit.n_points},
                          {"residual_std", fit.residual_std}};
}

/// Synthetic transition-time dataset tau = (k1/Re) * exp(eps) with
/// eps ~ Normal(0, noise_rel); deterministic for a fixed seed.
inline std::vector<std::pair<double, double>> synth_sk_dataset(double k1, double noise_rel,
                                                               const std::vector<double>& re_values,
                                                               uint64_t seed) {
    if (!(k1 > 0.0) || !std::isfinite(k1)) throw DomainError("synth dataset k1 must be > 0");
    if (!(noise_rel >= 0.0) || !std::isfinite(noise_rel))
        throw DomainError("synth dataset noise_rel must be >= 0");
    for (double re : re_values)
        if (!(re > 0.0) || !std::isfinite(re))
            throw DomainError("synth dataset re values must be finite and > 0");
    Rng rng(seed);
    std::vector<std::pair<double, double>> points;
    points.reserve(re_values.size());
    for (double re : re_values)
        points.emplace_back(re, (k1 / re) * std::exp(noise_rel * rng.normal()));
    return points;
}

/// n log-spaced values in [lo, hi] inclusive.
inline std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo)) throw DomainError("log spacing needs 0 < lo < hi");
    if (n < 2) throw DomainError("log spacing needs at least 2 values");
    std::vector<double> out(static_cast<size_t>(n));
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] =
            std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace leray
