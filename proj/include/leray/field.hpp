#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "leray/errors.hpp"
#include "leray/grid.hpp"

namespace leray {

/// Scalar quantity sampled at grid nodes, row-major (ny rows of nx values).
struct ScalarField {
    Grid grid;
    std::vector<double> data;

    ScalarField() : data(static_cast<size_t>(grid.size()), 0.0) {}

    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), data(static_cast<size_t>(g.size()), fill) {}

    ScalarField(const Grid& g, std::vector<double> values) : grid(g), data(std::move(values)) {
        if (data.size() != static_cast<size_t>(g.size()))
            throw ShapeError("scalar field payload has " + std::to_string(data.size()) +
                             " values, grid expects " + std::to_string(g.size()));
    }

    double operator()(int i, int j) const { return data[static_cast<size_t>(grid.index(i, j))]; }
    double& operator()(int i, int j) { return data[static_cast<size_t>(grid.index(i, j))]; }
};

/// Two-component velocity sampled at grid nodes.
struct VelocityField {
    ScalarField u;
    ScalarField v;

    VelocityField() = default;

    explicit VelocityField(const Grid& g) : u(g), v(g) {}

    VelocityField(ScalarField u_, ScalarField v_) : u(std::move(u_)), v(std::move(v_)) {
        if (u.grid != v.grid)
            throw ShapeError("velocity components live on different grids");
    }

    const Grid& grid() const { return u.grid; }
};

/// Physical constants and characteristic scales of a flow.
struct FlowParams {
    double nu = 0.01;    // kinematic viscosity
    double rho = 1.0;    // density (reporting only; pressure is stored as p/rho)
    double g = 0.0;      // gravitational acceleration, vertical axis = y
    double u_char = 1.0; // characteristic velocity U
    double l_char = 1.0; // characteristic length L

    void validate() const {
        if (!(nu > 0.0)) throw DomainError("params.nu must be > 0 (got " + std::to_string(nu) + ")");
        if (!(rho > 0.0)) throw DomainError("params.rho must be > 0 (got " + std::to_string(rho) + ")");
        if (!(g >= 0.0)) throw DomainError("params.g must be >= 0 (got " + std::to_string(g) + ")");
        if (!(u_char > 0.0))
            throw DomainError("params.u_char must be > 0 (got " + std::to_string(u_char) + ")");
        if (!(l_char > 0.0))
            throw DomainError("params.l_char must be > 0 (got " + std::to_string(l_char) + ")");
    }
};

/// Time-stamped flow state. Pressure is stored as p/rho on the same grid
/// as the velocity.
struct Snapshot {
    double time = 0.0;
    VelocityField velocity;
    ScalarField pressure;

    Snapshot() = default;

    Snapshot(double t, VelocityField vel, ScalarField p)
        : time(t), velocity(std::move(vel)), pressure(std::move(p)) {
        if (pressure.grid != velocity.grid())
            throw ShapeError("snapshot pressure grid differs from velocity grid");
    }

    const Grid& grid() const { return velocity.grid(); }
};

inline bool all_finite(const ScalarField& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

inline bool all_finite(const VelocityField& f) {
    return all_finite(f.u) && all_finite(f.v);
}

inline bool all_finite(const Snapshot& s) {
    return std::isfinite(s.time) && all_finite(s.velocity) && all_finite(s.pressure);
}

inline double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    return m;
}

/// Max pointwise speed max_ij sqrt(u^2 + v^2).
inline double max_speed(const VelocityField& f) {
    double m2 = 0.0;
    for (size_t n = 0; n < f.u.data.size(); ++n) {
        double s2 = f.u.data[n] * f.u.data[n] + f.v.data[n] * f.v.data[n];
        m2 = std::max(m2, s2);
    }
    return std::sqrt(m2);
}

} // namespace leray
