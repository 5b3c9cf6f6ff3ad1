#pragma once

#include <cmath>
#include <vector>

#include "leray/field.hpp"
#include "leray/grid.hpp"
#include "leray/rng.hpp"

namespace leray {

/// Taylor-Green vortex u = a sin(x)cos(y), v = -a cos(x)sin(y), sampled at
/// the nodes. Divergence-free identically; on domains whose side lengths
/// are integer multiples of 2*pi the samples are band-limited and the
/// spectral divergence vanishes to round-off.
inline VelocityField taylor_green(const Grid& grid, double amplitude) {
    grid.validate();
    VelocityField f(grid);
    for (int j = 0; j < grid.ny; ++j) {
        double y = grid.y(j);
        double cy = std::cos(y), sy = std::sin(y);
        for (int i = 0; i < grid.nx; ++i) {
            double x = grid.x(i);
            f.u(i, j) = amplitude * std::sin(x) * cy;
            f.v(i, j) = -amplitude * std::cos(x) * sy;
        }
    }
    return f;
}

/// Pressure consistent with the Taylor-Green field above:
/// p/rho = a^2 (cos 2x + cos 2y)/4 * exp(-4 nu t), zero mean.
/// (Momentum balance for this orientation gives the positive sign; the
/// spectral Poisson solve reproduces it.)
inline ScalarField taylor_green_pressure(const Grid& grid, double amplitude, double nu,
                                         double t) {
    ScalarField p(grid);
    double scale = 0.25 * amplitude * amplitude * std::exp(-4.0 * nu * t);
    for (int j = 0; j < grid.ny; ++j) {
        double c2y = std::cos(2.0 * grid.y(j));
        for (int i = 0; i < grid.nx; ++i)
            p(i, j) = scale * (std::cos(2.0 * grid.x(i)) + c2y);
    }
    return p;
}

/// Exact decayed Taylor-Green state at time t: the velocity scales by
/// exp(-2 nu t) and the pressure by exp(-4 nu t). Closed-form reference
/// state for solver and diagnostics checks.
inline Snapshot analytic_taylor_green(const Grid& grid, double amplitude, double nu, double t) {
    double decayed = amplitude * std::exp(-2.0 * nu * t);
    return Snapshot(t, taylor_green(grid, decayed), taylor_green_pressure(grid, amplitude, nu, t));
}

/// Band-limited random shear flow: a streamfunction built from modes with
/// 0 < |m|^2 <= 16, coefficients drawn from a seeded generator, velocity
/// evaluated analytically (hence exactly divergence-free) and rescaled so
/// that max|u| equals the requested amplitude.
inline VelocityField random_shear(const Grid& grid, uint64_t seed, double amplitude) {
    grid.validate();
    struct Mode {
        double mx, my; // physical wavenumbers
        double a, b;   // psi += a cos(mx x + my y) + b sin(mx x + my y)
    };
    std::vector<Mode> modes;
    Rng rng(seed);
    for (int mx = -4; mx <= 4; ++mx) {
        for (int my = 0; my <= 4; ++my) {
            if (my == 0 && mx <= 0) continue; // half-plane; real field needs one of each pair
            int m2 = mx * mx + my * my;
            if (m2 == 0 || m2 > 16) continue;
            double damp = 1.0 / (1.0 + m2);
            Mode m;
            m.mx = kTwoPi * mx / grid.lx;
            m.my = kTwoPi * my / grid.ly;
            m.a = damp * rng.normal();
            m.b = damp * rng.normal();
            modes.push_back(m);
        }
    }

    VelocityField f(grid);
    for (int j = 0; j < grid.ny; ++j) {
        double y = grid.y(j);
        for (int i = 0; i < grid.nx; ++i) {
            double x = grid.x(i);
            double u = 0.0, v = 0.0;
            for (const Mode& m : modes) {
                double phase = m.mx * x + m.my * y;
                double c = std::cos(phase), s = std::sin(phase);
                // u = d(psi)/dy, v = -d(psi)/dx
                u += m.my * (-m.a * s + m.b * c);
                v -= m.mx * (-m.a * s + m.b * c);
            }
            f.u(i, j) = u;
            f.v(i, j) = v;
        }
    }

    double peak = max_speed(f);
    if (peak > 0.0 && amplitude != 0.0) {
        double scale = amplitude / peak;
        for (auto& u : f.u.data) u *= scale;
        for (auto& v : f.v.data) v *= scale;
    } else {
        for (auto& u : f.u.data) u = 0.0;
        for (auto& v : f.v.data) v = 0.0;
    }
    return f;
}

} // namespace leray
