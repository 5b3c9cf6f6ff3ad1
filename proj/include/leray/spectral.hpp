#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "leray/fft.hpp"
#include "leray/field.hpp"
#include "leray/grid.hpp"

namespace leray {

/// Pseudo-spectral operator toolbox on one periodic grid: transforms,
/// exact derivatives of the trigonometric interpolant, Poisson inversion
/// and the 2/3-rule dealiasing mask. Owns FFT workspaces, so instances are
/// single-thread; operations behave as pure functions of their arguments.
class SpectralOps {
  public:
    explicit SpectralOps(const Grid& g) : grid_(g), fft_(g.ny, g.nx) {
        g.validate();
        kx_.resize(g.nx);
        ky_.resize(g.ny);
        // Wavenumber of column i is 2*pi*m/lx with m wrapped to [-nx/2, nx/2);
        // the Nyquist index lands on the negative branch.
        for (int i = 0; i < g.nx; ++i) {
            int m = (i < (g.nx + 1) / 2) ? i : i - g.nx;
            kx_[i] = kTwoPi * m / g.lx;
        }
        for (int j = 0; j < g.ny; ++j) {
            int m = (j < (g.ny + 1) / 2) ? j : j - g.ny;
            ky_[j] = kTwoPi * m / g.ly;
        }
        // First derivatives drop the (real, unpaired) Nyquist mode.
        kxd_ = kx_;
        kyd_ = ky_;
        kxd_[g.nx / 2] = 0.0;
        kyd_[g.ny / 2] = 0.0;
    }

    const Grid& grid() const { return grid_; }

    double kx(int i) const { return kx_[i]; }
    double ky(int j) const { return ky_[j]; }
    double k_sq(int i, int j) const { return kx_[i] * kx_[i] + ky_[j] * ky_[j]; }

    /// 2/3 rule: keep |m_x| <= nx/3 and |m_y| <= ny/3.
    bool dealias_keep(int i, int j) const {
        int mx = (i <= grid_.nx / 2) ? i : i - grid_.nx;
        int my = (j <= grid_.ny / 2) ? j : j - grid_.ny;
        return 3 * std::abs(mx) <= grid_.nx && 3 * std::abs(my) <= grid_.ny;
    }

    Spectrum forward(const ScalarField& f) { return fft_.forward(f.data); }

    ScalarField inverse(const Spectrum& spec) {
        return ScalarField(grid_, fft_.inverse(spec));
    }

    void dealias(Spectrum& spec) const {
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i)
                if (!dealias_keep(i, j)) spec[idx(i, j)] = 0.0;
    }

    Spectrum deriv_x(const Spectrum& spec) const {
        Spectrum out(spec.size());
        const std::complex<double> iu(0.0, 1.0);
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i)
                out[idx(i, j)] = iu * kxd_[i] * spec[idx(i, j)];
        return out;
    }

    Spectrum deriv_y(const Spectrum& spec) const {
        Spectrum out(spec.size());
        const std::complex<double> iu(0.0, 1.0);
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i)
                out[idx(i, j)] = iu * kyd_[j] * spec[idx(i, j)];
        return out;
    }

    Spectrum laplacian(const Spectrum& spec) const {
        Spectrum out(spec.size());
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i)
                out[idx(i, j)] = -k_sq(i, j) * spec[idx(i, j)];
        return out;
    }

    /// Solve lap(p) = rhs with the zero-mean gauge (mode (0,0) set to 0).
    Spectrum invert_laplacian(const Spectrum& rhs) const {
        Spectrum out(rhs.size());
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                double k2 = k_sq(i, j);
                out[idx(i, j)] = (k2 > 0.0) ? rhs[idx(i, j)] / (-k2) : 0.0;
            }
        return out;
    }

    /// Nodal gradient (df/dx, df/dy) of the trigonometric interpolant.
    std::pair<ScalarField, ScalarField> gradient(const ScalarField& f) {
        Spectrum spec = forward(f);
        return {inverse(deriv_x(spec)), inverse(deriv_y(spec))};
    }

    /// omega_hat = i kx v_hat - i ky u_hat.
    Spectrum vorticity_hat(const VelocityField& f) {
        Spectrum u_hat = fft_.forward(f.u.data);
        Spectrum v_hat = fft_.forward(f.v.data);
        Spectrum w(u_hat.size());
        const std::complex<double> iu(0.0, 1.0);
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                size_t n = idx(i, j);
                w[n] = iu * (kxd_[i] * v_hat[n] - kyd_[j] * u_hat[n]);
            }
        return w;
    }

    /// Streamfunction psi_hat = omega_hat / k^2 (inverse of -lap, zero mean).
    Spectrum streamfunction_hat(const Spectrum& omega_hat) const {
        Spectrum psi(omega_hat.size());
        for (int j = 0; j < grid_.ny; ++j)
            for (int i = 0; i < grid_.nx; ++i) {
                double k2 = k_sq(i, j);
                psi[idx(i, j)] = (k2 > 0.0) ? omega_hat[idx(i, j)] / k2 : 0.0;
            }
        return psi;
    }

    /// u = d(psi)/dy, v = -d(psi)/dx; divergence-free by construction.
    VelocityField velocity_from_vorticity_hat(const Spectrum& omega_hat) {
        Spectrum psi = streamfunction_hat(omega_hat);
        ScalarField u = inverse(deriv_y(psi));
        ScalarField v_field(grid_);
        {
            Spectrum vx = deriv_x(psi);
            for (auto& c : vx) c = -c;
            v_field = inverse(vx);
        }
        return VelocityField(std::move(u), std::move(v_field));
    }

    size_t idx(int i, int j) const { return static_cast<size_t>(j) * grid_.nx + i; }

  private:
    Grid grid_;
    Fft2D fft_;
    std::vector<double> kx_, ky_;   // full wavenumbers (Laplacian)
    std::vector<double> kxd_, kyd_; // Nyquist-zeroed (first derivatives)
};

/// Spectral divergence du/dx + dv/dy at the nodes.
inline ScalarField divergence(const VelocityField& f) {
    SpectralOps ops(f.grid());
    Spectrum u_hat = ops.forward(f.u);
    Spectrum v_hat = ops.forward(f.v);
    Spectrum div = ops.deriv_x(u_hat);
    Spectrum dv = ops.deriv_y(v_hat);
    for (size_t k = 0; k < div.size(); ++k) div[k] += dv[k];
    return ops.inverse(div);
}

} // namespace leray
