#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "leray/csv.hpp"
#include "leray/errors.hpp"
#include "leray/field.hpp"
#include "leray/spectral.hpp"
#include "leray/timeline.hpp"

namespace leray {

/// Kinetic energy (1/2) * integral of |u|^2. The uniform-weight node sum
/// is the exact quadrature for periodic band-limited fields.
inline double kinetic_energy(const VelocityField& f) {
    double sum = 0.0;
    for (size_t n = 0; n < f.u.data.size(); ++n)
        sum += f.u.data[n] * f.u.data[n] + f.v.data[n] * f.v.data[n];
    return 0.5 * sum * f.grid().cell_area();
}

/// Squared L2 norm, integral of |u|^2 (twice the kinetic energy).
inline double l2_norm_sq(const VelocityField& f) { return 2.0 * kinetic_energy(f); }

/// Squared H1 seminorm: integral of grad(u_i) . grad(u_i), gradients
/// evaluated spectrally. A measure of enstrophy / shear intensity.
inline double h1_norm_sq(const VelocityField& f) {
    SpectralOps ops(f.grid());
    auto [ux, uy] = ops.gradient(f.u);
    auto [vx, vy] = ops.gradient(f.v);
    double sum = 0.0;
    for (size_t n = 0; n < ux.data.size(); ++n)
        sum += ux.data[n] * ux.data[n] + uy.data[n] * uy.data[n] + vx.data[n] * vx.data[n] +
               vy.data[n] * vy.data[n];
    return sum * f.grid().cell_area();
}

/// Total mechanical energy per unit mass E = p/rho + |u|^2/2 + g*y,
/// nodewise; the vertical coordinate is the y axis.
inline ScalarField mechanical_energy_field(const VelocityField& f, const ScalarField& p_over_rho,
                                           const FlowParams& params) {
    if (f.grid() != p_over_rho.grid)
        throw ShapeError("mechanical energy: velocity and pressure grids differ");
    const Grid& g = f.grid();
    ScalarField e(g);
    for (int j = 0; j < g.ny; ++j) {
        double gy = params.g * g.y(j);
        for (int i = 0; i < g.nx; ++i) {
            double u = f.u(i, j), v = f.v(i, j);
            e(i, j) = p_over_rho(i, j) + 0.5 * (u * u + v * v) + gy;
        }
    }
    return e;
}

/// Rate of change of E along streamlines, u . grad(E), with spectral
/// gradients of E.
inline ScalarField streamwise_energy_derivative(const VelocityField& f, const ScalarField& e) {
    if (f.grid() != e.grid)
        throw ShapeError("streamwise derivative: velocity and energy grids differ");
    SpectralOps ops(f.grid());
    auto [ex, ey] = ops.gradient(e);
    ScalarField out(f.grid());
    for (size_t n = 0; n < out.data.size(); ++n)
        out.data[n] = f.u.data[n] * ex.data[n] + f.v.data[n] * ey.data[n];
    return out;
}

/// Same contraction with caller-supplied gradient components. This is the
/// evaluation path for energies whose analytic gradient is known but whose
/// node samples are not periodic (e.g. a streamwise pressure ramp).
inline ScalarField streamwise_energy_derivative(const VelocityField& f, const ScalarField& grad_e_x,
                                                const ScalarField& grad_e_y) {
    if (f.grid() != grad_e_x.grid || f.grid() != grad_e_y.grid)
        throw ShapeError("streamwise derivative: gradient grids differ from velocity grid");
    ScalarField out(f.grid());
    for (size_t n = 0; n < out.data.size(); ++n)
        out.data[n] = f.u.data[n] * grad_e_x.data[n] + f.v.data[n] * grad_e_y.data[n];
    return out;
}

struct CriticalSet {
    Grid grid;
    std::vector<uint8_t> mask; // 1 where |u.grad(E)| is below threshold
    double critical_fraction = 0.0;
};

/// Threshold the precomputed streamwise derivative s = u.grad(E). A node is
/// critical when |s| <= tol_rel * max|s|. When max|s| falls below the
/// absolute floor 1e-14 * U^3/L the whole domain is critical (globally
/// Bernoulli flow).
inline CriticalSet critical_set_from_derivative(const ScalarField& s, double tol_rel,
                                                const FlowParams& params) {
    if (!(tol_rel > 0.0)) throw DomainError("critical set tol_rel must be > 0");
    params.validate();
    CriticalSet result;
    result.grid = s.grid;
    result.mask.assign(s.data.size(), 0);

    double peak = max_abs(s);
    double floor = 1e-14 * params.u_char * params.u_char * params.u_char / params.l_char;
    if (peak <= floor) {
        std::fill(result.mask.begin(), result.mask.end(), uint8_t{1});
        result.critical_fraction = 1.0;
        return result;
    }

    double threshold = tol_rel * peak;
    size_t marked = 0;
    for (size_t n = 0; n < s.data.size(); ++n) {
        if (std::abs(s.data[n]) <= threshold) {
            result.mask[n] = 1;
            ++marked;
        }
    }
    result.critical_fraction = static_cast<double>(marked) / static_cast<double>(s.data.size());
    return result;
}

/// Criticality of the field pair (u, E): where the mechanical energy
/// gradient is perpendicular to the streamlines.
inline CriticalSet critical_set(const VelocityField& f, const ScalarField& e, double tol_rel,
                                const FlowParams& params) {
    return critical_set_from_derivative(streamwise_energy_derivative(f, e), tol_rel, params);
}

struct ResidualResult {
    double raw = 0.0;        // (1/2) d/dt ||u||_L2^2 + nu ||u||_H1^2
    double normalized = 0.0; // raw / max(nu ||u||_H1^2, floor)
};

namespace detail {

inline ResidualResult residual_from_series(const std::vector<double>& kinetic,
                                           const std::vector<double>& h1,
                                           const std::vector<double>& times, size_t k, double nu) {
    // (1/2) d/dt ||u||^2 = d/dt KE, centered difference over the neighbors.
    double dkedt = (kinetic[k + 1] - kinetic[k - 1]) / (times[k + 1] - times[k - 1]);
    double dissipation = nu * h1[k];
    ResidualResult r;
    r.raw = dkedt + dissipation;
    r.normalized = r.raw / std::max(dissipation, 1e-300);
    return r;
}

} // namespace detail

/// Residual of the energy identity at interior snapshot k, centered
/// difference in time. Exactly zero in the continuum for unforced flow.
inline ResidualResult energy_identity_residual(const Timeline& tl, size_t k) {
    if (tl.snapshots.size() < 3)
        throw InsufficientDataError("energy identity residual needs at least 3 snapshots, got " +
                                    std::to_string(tl.snapshots.size()));
    if (k == 0 || k + 1 >= tl.snapshots.size())
        throw IndexError("energy identity residual needs interior index, got " +
                         std::to_string(k));
    std::vector<double> ke(3), h1(3), t(3);
    for (int d = -1; d <= 1; ++d) {
        const Snapshot& s = tl.snapshots[k + d];
        ke[d + 1] = kinetic_energy(s.velocity);
        h1[d + 1] = h1_norm_sq(s.velocity);
        t[d + 1] = s.time;
    }
    return detail::residual_from_series(ke, h1, t, 1, tl.params.nu);
}

struct IndicatorResult {
    bool global_hit = false;
    double indicator = 1.0; // sqrt(h1(k)/h1(0)), clamped to [0, 1]
};

namespace detail {

inline IndicatorResult indicator_from(double h1_k, double h1_0, double theta) {
    IndicatorResult r;
    r.indicator = std::clamp(std::sqrt(h1_k / h1_0), 0.0, 1.0);
    r.global_hit = r.indicator <= theta;
    return r;
}

} // namespace detail

/// Relative H1 decay indicator at snapshot k against the initial state.
/// The limiting criterion ||u||_H1 -> 0 is operationalized as the first
/// crossing of indicator <= theta. theta in (0, 1]; theta = 1 marks the
/// initial snapshot itself.
inline IndicatorResult singularity_indicator(const Timeline& tl, size_t k, double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw DomainError("singularity threshold theta must lie in (0, 1]");
    if (tl.snapshots.empty()) throw ValidationError("timeline has no snapshots");
    if (k >= tl.snapshots.size())
        throw IndexError("snapshot index " + std::to_string(k) + " out of range");
    double ref = h1_norm_sq(tl.snapshots.front().velocity);
    if (!(ref > 0.0))
        throw UndefinedReferenceError("initial H1 norm is zero; indicator undefined");
    return detail::indicator_from(h1_norm_sq(tl.snapshots[k].velocity), ref, theta);
}

enum class RegimeLabel {
    Laminar,
    CriticalEquilibrium,
    SingularityOnset,
    TransitionInstant,
    FullyTurbulent,
};

inline const char* to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::Laminar: return "Laminar";
        case RegimeLabel::CriticalEquilibrium: return "CriticalEquilibrium";
        case RegimeLabel::SingularityOnset: return "SingularityOnset";
        case RegimeLabel::TransitionInstant: return "TransitionInstant";
        case RegimeLabel::FullyTurbulent: return "FullyTurbulent";
    }
    return "?";
}

/// Stage-classification thresholds. Artifact choices, not physical
/// constants; every knob is exposed in the diagnose configuration.
struct RegimeConfig {
    double theta = 0.5;                 // singularity-onset indicator threshold
    double theta_hi = 0.9;              // laminar requires indicator above this
    double critical_fraction_min = 0.5; // critical-equilibrium fraction threshold
    double critical_tol_rel = 1e-6;     // node threshold for the critical set
    int transition_window = 3;          // snapshots labeled TransitionInstant after onset
    int variance_window = 5;            // rolling window for the turbulence test
    double variance_ratio_tol = 0.01;   // var(h1)/mean(h1)^2 above this = turbulent

    void validate() const {
        if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("regime theta must lie in (0, 1]");
        if (!(theta_hi > 0.0 && theta_hi <= 1.0))
            throw DomainError("regime theta_hi must lie in (0, 1]");
        if (!(critical_fraction_min >= 0.0 && critical_fraction_min <= 1.0))
            throw DomainError("regime critical_fraction_min must lie in [0, 1]");
        if (!(critical_tol_rel > 0.0)) throw DomainError("regime critical_tol_rel must be > 0");
        if (transition_window < 0) throw DomainError("regime transition_window must be >= 0");
        if (variance_window < 2) throw DomainError("regime variance_window must be >= 2");
        if (!(variance_ratio_tol > 0.0)) throw DomainError("regime variance_ratio_tol must be > 0");
    }
};

namespace detail {

/// Label sequence from precomputed per-snapshot series. Labels never
/// regress in the stage order; unmatched pre-onset snapshots keep the
/// previous label.
inline std::vector<RegimeLabel> classify_series(const std::vector<double>& indicator,
                                                const std::vector<double>& critical_fraction,
                                                const std::vector<double>& h1,
                                                const RegimeConfig& cfg) {
    size_t n = indicator.size();
    std::vector<RegimeLabel> labels(n, RegimeLabel::Laminar);
    bool onset_seen = false;
    size_t onset_index = 0;
    RegimeLabel current = RegimeLabel::Laminar;

    for (size_t k = 0; k < n; ++k) {
        if (!onset_seen) {
            if (indicator[k] <= cfg.theta) {
                onset_seen = true;
                onset_index = k;
                current = RegimeLabel::SingularityOnset;
            } else if (critical_fraction[k] >= cfg.critical_fraction_min) {
                current = RegimeLabel::CriticalEquilibrium;
            } else if (indicator[k] > cfg.theta_hi &&
                       current == RegimeLabel::Laminar) {
                current = RegimeLabel::Laminar;
            }
            // otherwise: persist the previous label
            labels[k] = current;
            continue;
        }

        // Post-onset stages.
        if (k <= onset_index + static_cast<size_t>(cfg.transition_window) &&
            current < RegimeLabel::FullyTurbulent) {
            if (k > onset_index) current = RegimeLabel::TransitionInstant;
            labels[k] = current;
        } else {
            if (current < RegimeLabel::FullyTurbulent) {
                // Rolling relative variance of the H1 norm over the trailing window.
                size_t w = static_cast<size_t>(cfg.variance_window);
                size_t lo = (k + 1 >= w) ? k + 1 - w : 0;
                size_t m = k + 1 - lo;
                double mean = 0.0;
                for (size_t q = lo; q <= k; ++q) mean += h1[q];
                mean /= static_cast<double>(m);
                double var = 0.0;
                for (size_t q = lo; q <= k; ++q) var += (h1[q] - mean) * (h1[q] - mean);
                var /= static_cast<double>(m);
                if (mean > 0.0 && m >= w && var / (mean * mean) > cfg.variance_ratio_tol)
                    current = RegimeLabel::FullyTurbulent;
            }
            labels[k] = current;
        }
    }
    return labels;
}

} // namespace detail

/// Stage label per snapshot, in the order laminar -> critical equilibrium
/// -> singularity onset -> transition instant -> fully turbulent.
inline std::vector<RegimeLabel> classify_regime(const Timeline& tl,
                                                const RegimeConfig& cfg = RegimeConfig{}) {
    cfg.validate();
    validate_timeline(tl);
    size_t n = tl.snapshots.size();
    std::vector<double> indicator(n, 1.0), fraction(n, 0.0), h1(n, 0.0);
    double ref = h1_norm_sq(tl.snapshots.front().velocity);
    for (size_t k = 0; k < n; ++k) {
        const Snapshot& s = tl.snapshots[k];
        h1[k] = h1_norm_sq(s.velocity);
        indicator[k] =
            ref > 0.0 ? detail::indicator_from(h1[k], ref, cfg.theta).indicator : 1.0;
        ScalarField e = mechanical_energy_field(s.velocity, s.pressure, tl.params);
        fraction[k] = critical_set(s.velocity, e, cfg.critical_tol_rel, tl.params).critical_fraction;
    }
    return detail::classify_series(indicator, fraction, h1, cfg);
}

/// One diagnostics row per snapshot. Residual entries are absent at the
/// timeline endpoints (centered difference needs both neighbors).
struct DiagnosticRecord {
    double time = 0.0;
    double kinetic_energy = 0.0;
    double h1_norm_sq = 0.0;
    std::optional<double> identity_residual;
    std::optional<double> identity_residual_normalized;
    double critical_fraction = 0.0;
    double singularity_indicator = 1.0;
    RegimeLabel regime_label = RegimeLabel::Laminar;
};

/// Evaluate every diagnostic over the timeline. For an identically zero
/// initial state the indicator reference is undefined; records then carry
/// indicator 1.0 (no decay observable).
inline std::vector<DiagnosticRecord> compute_diagnostics(const Timeline& tl,
                                                         const RegimeConfig& cfg = RegimeConfig{}) {
    cfg.validate();
    validate_timeline(tl);
    size_t n = tl.snapshots.size();
    std::vector<double> ke(n), h1(n), times(n), indicator(n, 1.0), fraction(n, 0.0);
    for (size_t k = 0; k < n; ++k) {
        const Snapshot& s = tl.snapshots[k];
        times[k] = s.time;
        ke[k] = kinetic_energy(s.velocity);
        h1[k] = h1_norm_sq(s.velocity);
        ScalarField e = mechanical_energy_field(s.velocity, s.pressure, tl.params);
        fraction[k] = critical_set(s.velocity, e, cfg.critical_tol_rel, tl.params).critical_fraction;
    }
    double ref = h1[0];
    for (size_t k = 0; k < n; ++k)
        indicator[k] = ref > 0.0 ? detail::indicator_from(h1[k], ref, cfg.theta).indicator : 1.0;
    std::vector<RegimeLabel> labels = detail::classify_series(indicator, fraction, h1, cfg);

    std::vector<DiagnosticRecord> records(n);
    for (size_t k = 0; k < n; ++k) {
        DiagnosticRecord& r = records[k];
        r.time = times[k];
        r.kinetic_energy = ke[k];
        r.h1_norm_sq = h1[k];
        if (k > 0 && k + 1 < n) {
            ResidualResult res = detail::residual_from_series(ke, h1, times, k, tl.params.nu);
            r.identity_residual = res.raw;
            r.identity_residual_normalized = res.normalized;
        }
        r.critical_fraction = fraction[k];
        r.singularity_indicator = indicator[k];
        r.regime_label = labels[k];
    }
    return records;
}

/// Fixed-order diagnostics CSV; endpoint residual cells are left empty.
inline std::string diagnostics_csv(const std::vector<DiagnosticRecord>& records) {
    std::string out =
        "time,kinetic_energy,h1_norm_sq,identity_residual_raw,identity_residual_normalized,"
        "critical_fraction,singularity_indicator,regime_label\n";
    for (const DiagnosticRecord& r : records) {
        out += csv_join({format_double(r.time), format_double(r.kinetic_energy),
                         format_double(r.h1_norm_sq),
                         r.identity_residual ? format_double(*r.identity_residual) : "",
                         r.identity_residual_normalized
                             ? format_double(*r.identity_residual_normalized)
                             : "",
                         format_double(r.critical_fraction),
                         format_double(r.singularity_indicator), to_string(r.regime_label)});
    }
    return out;
}

struct LerayCheck {
    double sup_l2_sq = 0.0;       // max over snapshots of ||u||_L2^2
    double h1_time_integral = 0.0; // trapezoid integral of ||u||_H1^2 over time
    bool sup_finite = false;
    bool integral_finite = false;

    bool ok() const { return sup_finite && integral_finite; }
};

/// Membership check for the Leray solution space: bounded L2 energy in
/// time and time-integrable H1 norm.
inline LerayCheck leray_membership(const Timeline& tl) {
    validate_timeline(tl);
    LerayCheck check;
    size_t n = tl.snapshots.size();
    std::vector<double> h1(n);
    for (size_t k = 0; k < n; ++k) {
        check.sup_l2_sq = std::max(check.sup_l2_sq, l2_norm_sq(tl.snapshots[k].velocity));
        h1[k] = h1_norm_sq(tl.snapshots[k].velocity);
    }
    for (size_t k = 0; k + 1 < n; ++k)
        check.h1_time_integral +=
            0.5 * (h1[k] + h1[k + 1]) * (tl.snapshots[k + 1].time - tl.snapshots[k].time);
    check.sup_finite = std::isfinite(check.sup_l2_sq);
    check.integral_finite = std::isfinite(check.h1_time_integral);
    return check;
}

/// Kinetic energy must not grow along an unforced run, within round-off
/// slack proportional to the number of integrator steps.
inline bool energy_monotone(const Timeline& tl, double slack_per_step = 1e-12) {
    double slack = slack_per_step * static_cast<double>(std::max(tl.steps, 1L));
    double prev = kinetic_energy(tl.snapshots.front().velocity);
    for (size_t k = 1; k < tl.snapshots.size(); ++k) {
        double cur = kinetic_energy(tl.snapshots[k].velocity);
        if (cur > prev + slack) return false;
        prev = cur;
    }
    return true;
}

} // namespace leray
