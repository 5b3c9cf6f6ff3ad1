#pragma once

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "leray/errors.hpp"

namespace leray {

using Spectrum = std::vector<std::complex<double>>;

/// FFTW's planner is a process-global resource and is not thread-safe;
/// every plan create/destroy must hold this lock. Transform execution on
/// distinct buffers is safe without it.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Complex-to-complex 2D transform pair on a fixed ny x nx row-major
/// layout. Forward output is normalized by 1/(nx*ny) so coefficients are
/// true Fourier amplitudes and the inverse needs no scaling. Instances own
/// their work buffers and are not safe for concurrent use; create one per
/// thread.
class Fft2D {
  public:
    Fft2D(int ny, int nx) : ny_(ny), nx_(nx), n_(static_cast<size_t>(nx) * ny) {
        in_ = fftw_alloc_complex(n_);
        out_ = fftw_alloc_complex(n_);
        if (!in_ || !out_) throw Error("fftw buffer allocation failed");
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_2d(ny_, nx_, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_2d(ny_, nx_, in_, out_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw Error("fftw plan creation failed");
    }

    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    ~Fft2D() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }

    /// Real nodal values -> normalized Fourier coefficients.
    Spectrum forward(const std::vector<double>& real_values) {
        for (size_t k = 0; k < n_; ++k) {
            in_[k][0] = real_values[k];
            in_[k][1] = 0.0;
        }
        fftw_execute(fwd_);
        Spectrum spec(n_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (size_t k = 0; k < n_; ++k)
            spec[k] = std::complex<double>(out_[k][0] * scale, out_[k][1] * scale);
        return spec;
    }

    /// Normalized coefficients -> real nodal values (imaginary part dropped;
    /// inputs are expected to be Hermitian up to round-off).
    std::vector<double> inverse(const Spectrum& spec) {
        for (size_t k = 0; k < n_; ++k) {
            in_[k][0] = spec[k].real();
            in_[k][1] = spec[k].imag();
        }
        fftw_execute(bwd_);
        std::vector<double> values(n_);
        for (size_t k = 0; k < n_; ++k) values[k] = out_[k][0];
        return values;
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }

  private:
    int ny_;
    int nx_;
    size_t n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

} // namespace leray
