#pragma once

#include <string>

#include "leray/errors.hpp"

namespace leray {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform periodic rectangular lattice on [0,lx) x [0,ly).
/// Nodes are (x_i, y_j) = (i*lx/nx, j*ly/ny); both directions periodic.
struct Grid {
    int nx = 64;
    int ny = 64;
    double lx = kTwoPi;
    double ly = kTwoPi;

    Grid() = default;

    Grid(int nx_, int ny_, double lx_ = kTwoPi, double ly_ = kTwoPi)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        validate();
    }

    // nx, ny >= 8 and even (spectral symmetry), lx, ly > 0.
    void validate() const {
        if (nx < 8 || nx % 2 != 0)
            throw DomainError("grid.nx must be even and >= 8 (got " + std::to_string(nx) + ")");
        if (ny < 8 || ny % 2 != 0)
            throw DomainError("grid.ny must be even and >= 8 (got " + std::to_string(ny) + ")");
        if (!(lx > 0.0))
            throw DomainError("grid.lx must be > 0 (got " + std::to_string(lx) + ")");
        if (!(ly > 0.0))
            throw DomainError("grid.ly must be > 0 (got " + std::to_string(ly) + ")");
    }

    int size() const { return nx * ny; }
    double dx() const { return lx / nx; }
    double dy() const { return ly / ny; }
    double cell_area() const { return dx() * dy(); }

    double x(int i) const { return i * dx(); }
    double y(int j) const { return j * dy(); }

    /// Row-major node index, rows along y.
    int index(int i, int j) const { return j * nx + i; }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

} // namespace leray
