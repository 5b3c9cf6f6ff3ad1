#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "leray/errors.hpp"
#include "leray/field.hpp"
#include "leray/initial.hpp"
#include "leray/snapshot_io.hpp"
#include "leray/spectral.hpp"
#include "leray/timeline.hpp"

namespace leray {

struct InitialCondition {
    enum class Kind { TaylorGreen, File, RandomShear };

    Kind kind = Kind::TaylorGreen;
    double amplitude = 1.0;  // taylor_green / random_shear
    std::string path;        // file
    uint64_t seed = 1;       // random_shear

    void validate() const {
        if (kind != Kind::File) {
            if (!std::isfinite(amplitude) || amplitude < 0.0)
                throw ConfigError("initial condition amplitude must be finite and >= 0");
        } else if (path.empty()) {
            throw ConfigError("initial condition of type 'file' needs a non-empty path");
        }
    }
};

struct SolverConfig {
    Grid grid;
    FlowParams params;
    bool dt_auto = true; // when false, use the explicit dt below
    double dt = 0.0;
    double t_end = 1.0;
    double cfl = 0.4;
    bool dealias = true;
    double snapshot_interval = 0.1;
    InitialCondition initial_condition;

    void validate() const {
        grid.validate();
        params.validate();
        initial_condition.validate();
        if (!(t_end > 0.0) || !std::isfinite(t_end))
            throw ConfigError("solver config t_end must be finite and > 0");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("solver config cfl must lie in (0, 1]");
        if (!(snapshot_interval > 0.0) || !std::isfinite(snapshot_interval))
            throw ConfigError("solver config snapshot_interval must be finite and > 0");
        if (!dt_auto && (!(dt > 0.0) || !std::isfinite(dt)))
            throw ConfigError("solver config explicit dt must be finite and > 0");
    }
};

namespace detail {

inline void expect_object(const nlohmann::json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* name : allowed)
            if (item.key() == name) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
inline void read_key(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "' in " + where);
    }
}

} // namespace detail

/// Parse a flow-parameters object {nu, rho, g, u_char, l_char}; absent
/// keys keep defaults, unknown keys are rejected.
inline FlowParams flow_params_from_json(const nlohmann::json& j) {
    detail::expect_object(j, "params");
    detail::reject_unknown_keys(j, "params", {"nu", "rho", "g", "u_char", "l_char"});
    FlowParams p;
    detail::read_key(j, "nu", p.nu, "params");
    detail::read_key(j, "rho", p.rho, "params");
    detail::read_key(j, "g", p.g, "params");
    detail::read_key(j, "u_char", p.u_char, "params");
    detail::read_key(j, "l_char", p.l_char, "params");
    p.validate();
    return p;
}

inline nlohmann::json solver_config_to_json(const SolverConfig& c) {
    nlohmann::json j;
    j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"lx", c.grid.lx}, {"ly", c.grid.ly}};
    j["params"] = {{"nu", c.params.nu},
                   {"rho", c.params.rho},
                   {"g", c.params.g},
                   {"u_char", c.params.u_char},
                   {"l_char", c.params.l_char}};
    if (c.dt_auto)
        j["dt"] = "auto";
    else
        j["dt"] = c.dt;
    j["t_end"] = c.t_end;
    j["cfl"] = c.cfl;
    j["dealias"] = c.dealias;
    j["snapshot_interval"] = c.snapshot_interval;
    nlohmann::json ic;
    switch (c.initial_condition.kind) {
        case InitialCondition::Kind::TaylorGreen:
            ic = {{"type", "taylor_green"}, {"amplitude", c.initial_condition.amplitude}};
            break;
        case InitialCondition::Kind::File:
            ic = {{"type", "file"}, {"path", c.initial_condition.path}};
            break;
        case InitialCondition::Kind::RandomShear:
            ic = {{"type", "random_shear"},
                  {"seed", c.initial_condition.seed},
                  {"amplitude", c.initial_condition.amplitude}};
            break;
    }
    j["initial_condition"] = ic;
    return j;
}

/// Parse a solver configuration document. Absent keys keep their defaults;
/// unknown keys anywhere in the document are rejected.
inline SolverConfig solver_config_from_json(const nlohmann::json& j) {
    detail::expect_object(j, "solver config");
    detail::reject_unknown_keys(j, "solver config",
                                {"grid", "params", "dt", "t_end", "cfl", "dealias",
                                 "snapshot_interval", "initial_condition"});
    SolverConfig c;
    if (j.contains("grid")) {
        const nlohmann::json& g = j.at("grid");
        detail::expect_object(g, "grid");
        detail::reject_unknown_keys(g, "grid", {"nx", "ny", "lx", "ly"});
        detail::read_key(g, "nx", c.grid.nx, "grid");
        detail::read_key(g, "ny", c.grid.ny, "grid");
        detail::read_key(g, "lx", c.grid.lx, "grid");
        detail::read_key(g, "ly", c.grid.ly, "grid");
    }
    if (j.contains("params")) c.params = flow_params_from_json(j.at("params"));
    if (j.contains("dt")) {
        const nlohmann::json& d = j.at("dt");
        if (d.is_string()) {
            if (d.get<std::string>() != "auto")
                throw ConfigError("dt must be a positive number or the string \"auto\"");
            c.dt_auto = true;
        } else if (d.is_number()) {
            c.dt_auto = false;
            c.dt = d.get<double>();
        } else {
            throw ConfigError("dt must be a positive number or the string \"auto\"");
        }
    }
    detail::read_key(j, "t_end", c.t_end, "solver config");
    detail::read_key(j, "cfl", c.cfl, "solver config");
    detail::read_key(j, "dealias", c.dealias, "solver config");
    detail::read_key(j, "snapshot_interval", c.snapshot_interval, "solver config");
    if (j.contains("initial_condition")) {
        const nlohmann::json& ic = j.at("initial_condition");
        detail::expect_object(ic, "initial_condition");
        std::string type;
        detail::read_key(ic, "type", type, "initial_condition");
        if (type == "taylor_green") {
            detail::reject_unknown_keys(ic, "initial_condition", {"type", "amplitude"});
            c.initial_condition.kind = InitialCondition::Kind::TaylorGreen;
            detail::read_key(ic, "amplitude", c.initial_condition.amplitude, "initial_condition");
        } else if (type == "file") {
            detail::reject_unknown_keys(ic, "initial_condition", {"type", "path"});
            c.initial_condition.kind = InitialCondition::Kind::File;
            detail::read_key(ic, "path", c.initial_condition.path, "initial_condition");
        } else if (type == "random_shear") {
            detail::reject_unknown_keys(ic, "initial_condition", {"type", "seed", "amplitude"});
            c.initial_condition.kind = InitialCondition::Kind::RandomShear;
            detail::read_key(ic, "seed", c.initial_condition.seed, "initial_condition");
            detail::read_key(ic, "amplitude", c.initial_condition.amplitude, "initial_condition");
        } else {
            throw ConfigError("initial_condition type must be taylor_green, file, or random_shear");
        }
    }
    c.validate();
    return c;
}

inline SolverConfig solver_config_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("solver config is not valid JSON: ") + e.what());
    }
    return solver_config_from_json(j);
}

/// Periodic pressure recovered from the Poisson equation
/// lap(p/rho) = -(du/dx)^2 - 2 (du/dy)(dv/dx) - (dv/dy)^2, zero-mean gauge.
/// A constant body force is a gradient on the torus and is absorbed into
/// this modified pressure, so params.g does not appear.
inline ScalarField pressure_from_velocity(const VelocityField& f, const FlowParams& params) {
    params.validate();
    SpectralOps ops(f.grid());
    auto [ux, uy] = ops.gradient(f.u);
    auto [vx, vy] = ops.gradient(f.v);
    ScalarField rhs(f.grid());
    for (size_t n = 0; n < rhs.data.size(); ++n)
        rhs.data[n] = -(ux.data[n] * ux.data[n] + 2.0 * uy.data[n] * vx.data[n] +
                        vy.data[n] * vy.data[n]);
    Spectrum rhs_hat = ops.forward(rhs);
    ops.dealias(rhs_hat); // quadratic product: zero the alias-corrupted band
    return ops.inverse(ops.invert_laplacian(rhs_hat));
}

/// Pseudo-spectral vorticity-streamfunction integrator for the unforced
/// incompressible equations on a periodic box, explicit RK4 in time.
class NavierStokesSolver {
  public:
    NavierStokesSolver(const Grid& grid, const FlowParams& params, bool dealias = true)
        : grid_(grid), params_(params), dealias_(dealias), ops_(grid) {
        grid_.validate();
        params_.validate();
    }

    const Grid& grid() const { return grid_; }
    const FlowParams& params() const { return params_; }

    /// Spectral vorticity of a velocity field, band-limited when
    /// dealiasing is on (the integrator state must start band-limited).
    Spectrum vorticity_spectrum(const VelocityField& f) {
        if (f.grid() != grid_) throw ShapeError("velocity grid differs from solver grid");
        Spectrum w = ops_.vorticity_hat(f);
        if (dealias_) ops_.dealias(w);
        return w;
    }

    VelocityField velocity(const Spectrum& omega_hat) {
        return ops_.velocity_from_vorticity_hat(omega_hat);
    }

    double max_speed(const Spectrum& omega_hat) { return leray::max_speed(velocity(omega_hat)); }

    /// One RK4 step in place. dt = 0 is the identity. Throws BlowUpError
    /// carrying t_now + dt when the stepped state stops being finite.
    void step(Spectrum& omega_hat, double dt, double t_now = 0.0) {
        if (dt < 0.0) throw DomainError("step dt must be >= 0");
        if (dt == 0.0) return;
        Spectrum k1 = rhs(omega_hat);
        Spectrum stage = axpy(omega_hat, k1, 0.5 * dt);
        Spectrum k2 = rhs(stage);
        stage = axpy(omega_hat, k2, 0.5 * dt);
        Spectrum k3 = rhs(stage);
        stage = axpy(omega_hat, k3, dt);
        Spectrum k4 = rhs(stage);
        const double w = dt / 6.0;
        bool finite = true;
        for (size_t n = 0; n < omega_hat.size(); ++n) {
            omega_hat[n] += w * (k1[n] + 2.0 * (k2[n] + k3[n]) + k4[n]);
            double re = omega_hat[n].real(), im = omega_hat[n].imag();
            if (!std::isfinite(re) || !std::isfinite(im)) finite = false;
        }
        if (!finite) throw BlowUpError(t_now + dt);
    }

    /// d(omega_hat)/dt = -F[u . grad(omega)] - nu k^2 omega_hat.
    Spectrum rhs(const Spectrum& omega_hat) {
        VelocityField vel = ops_.velocity_from_vorticity_hat(omega_hat);
        ScalarField wx = ops_.inverse(ops_.deriv_x(omega_hat));
        ScalarField wy = ops_.inverse(ops_.deriv_y(omega_hat));
        ScalarField adv(grid_);
        for (size_t n = 0; n < adv.data.size(); ++n)
            adv.data[n] = vel.u.data[n] * wx.data[n] + vel.v.data[n] * wy.data[n];
        Spectrum out = ops_.forward(adv);
        if (dealias_) ops_.dealias(out);
        const double nu = params_.nu;
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                size_t n = ops_.idx(i, j);
                out[n] = -out[n] - nu * ops_.k_sq(i, j) * omega_hat[n];
            }
        return out;
    }

  private:
    static Spectrum axpy(const Spectrum& base, const Spectrum& k, double h) {
        Spectrum out(base.size());
        for (size_t n = 0; n < base.size(); ++n) out[n] = base[n] + h * k[n];
        return out;
    }

    Grid grid_;
    FlowParams params_;
    bool dealias_;
    SpectralOps ops_;
};

inline VelocityField realize_initial_condition(const SolverConfig& config) {
    const InitialCondition& ic = config.initial_condition;
    switch (ic.kind) {
        case InitialCondition::Kind::TaylorGreen: return taylor_green(config.grid, ic.amplitude);
        case InitialCondition::Kind::RandomShear:
            return random_shear(config.grid, ic.seed, ic.amplitude);
        case InitialCondition::Kind::File: {
            Snapshot s = snapshot_read(ic.path);
            if (s.grid() != config.grid)
                throw ConfigError("initial snapshot '" + ic.path +
                                  "' was stored on a different grid than the config grid");
            return s.velocity;
        }
    }
    throw ConfigError("unhandled initial condition kind");
}

namespace detail {

/// Snapshot target times: multiples of the interval from 0, with t_end
/// always the exact final entry.
inline std::vector<double> snapshot_times(double interval, double t_end) {
    std::vector<double> times;
    double eps = 1e-9 * std::max(1.0, t_end);
    for (long k = 0;; ++k) {
        double t = static_cast<double>(k) * interval;
        if (t >= t_end - eps) break;
        times.push_back(t);
    }
    times.push_back(t_end);
    return times;
}

} // namespace detail

/// Run the configured simulation and record snapshots (velocity plus
/// recovered pressure) at every multiple of snapshot_interval and at
/// t_end. Blow-up surfaces as BlowUpError carrying the failure time;
/// on_snapshot (when set) has already seen every snapshot recorded before
/// the failure, so callers can retain partial output.
inline Timeline simulate(const SolverConfig& config,
                         const std::function<void(const Snapshot&, size_t)>& on_snapshot = {}) {
    config.validate();
    VelocityField f0 = realize_initial_condition(config);
    NavierStokesSolver solver(config.grid, config.params, config.dealias);
    Spectrum omega = solver.vorticity_spectrum(f0);

    const double h = std::min(config.grid.dx(), config.grid.dy());
    const double viscous_cap = h * h / (4.0 * config.params.nu);
    const double eps_time = 1e-12 * std::max(1.0, config.t_end);

    Timeline tl;
    tl.params = config.params;
    auto record = [&](double t) {
        VelocityField vel = solver.velocity(omega);
        ScalarField p = pressure_from_velocity(vel, config.params);
        // Overflow can slip past the spectral finiteness check and only
        // materialize in the transformed fields; that is still a blow-up,
        // not a malformed snapshot.
        if (!all_finite(vel) || !all_finite(p)) throw BlowUpError(t);
        tl.snapshots.push_back(Snapshot{t, std::move(vel), std::move(p)});
        if (on_snapshot) on_snapshot(tl.snapshots.back(), tl.snapshots.size() - 1);
    };

    std::vector<double> targets = detail::snapshot_times(config.snapshot_interval, config.t_end);
    double t = 0.0;
    record(t);
    for (size_t idx = 1; idx < targets.size(); ++idx) {
        double target = targets[idx];
        while (t < target - eps_time) {
            double dt;
            if (config.dt_auto) {
                double umax = solver.max_speed(omega);
                double advective_cap = (umax > 0.0)
                                           ? config.cfl * h / umax
                                           : std::numeric_limits<double>::infinity();
                dt = std::min(advective_cap, viscous_cap);
            } else {
                dt = config.dt;
            }
            if (!(dt > eps_time)) throw BlowUpError(t); // time step collapsed
            dt = std::min(dt, target - t);
            solver.step(omega, dt, t);
            ++tl.steps;
            t += dt;
            if (t > target - eps_time) t = target;
        }
        record(target);
    }
    return tl;
}

} // namespace leray
