#pragma once

#include "pdcs/grid_dispersion.hpp"

#include <memory>
#include <span>
#include <vector>

namespace pdcs {

/// Unnormalized 1-D complex DFT of fixed length (FFTW backed, thread-safe execution).
class Fft {
public:
    explicit Fft(std::size_t n);
    ~Fft();
    Fft(const Fft &) = delete;
    Fft &operator=(const Fft &) = delete;
    Fft(Fft &&) noexcept;
    Fft &operator=(Fft &&) noexcept;

    std::size_t size() const noexcept { return n_; }
    /// out_k = sum_n in_n exp(-2 pi i k n / N)
    void forward(std::span<cplx> data) const;
    /// out_n = sum_k in_k exp(+2 pi i k n / N)
    void backward(std::span<cplx> data) const;

private:
    struct Plans;
    std::size_t n_;
    std::unique_ptr<Plans> plans_;
};

/// Complex intracavity envelope E_0. Stored in either representation:
///   Spectral:  values[i] = E_mu for mu = grid.mu(i)
///   Azimuthal: values[n] = E(theta_n), theta_n = 2 pi n / values.size(),
/// related by E(theta) = sum_mu E_mu exp(i mu theta).
class FieldState {
public:
    enum class Representation { Spectral, Azimuthal };

    FieldState() = default;
    static FieldState spectral(std::vector<cplx> modes, double time = 0.0);
    static FieldState azimuthal(std::vector<cplx> samples, int mode_count, double time = 0.0);
    static FieldState zeros(int mode_count);

    Representation representation() const noexcept { return rep_; }
    int mode_count() const noexcept { return mode_count_; }
    ModeGrid grid() const { return ModeGrid(mode_count_); }
    double time() const noexcept { return time_; }
    void set_time(double t) noexcept { time_ = t; }

    const std::vector<cplx> &values() const noexcept { return values_; }
    std::vector<cplx> &values() noexcept { return values_; }

    FieldState to_spectral() const;
    /// theta_count >= mode_count; resampling keeps only the grid modes.
    FieldState to_azimuthal(std::size_t theta_count) const;

    /// sqrt(sum_mu |E_mu|^2), equal to the RMS of E(theta).
    double norm() const;
    bool finite() const;

private:
    std::vector<cplx> values_;
    Representation rep_ = Representation::Spectral;
    int mode_count_ = 0;
    double time_ = 0.0;
};

/// Place grid modes onto a length-n periodic theta grid and transform (n >= grid size).
std::vector<cplx> modes_to_theta(std::span<const cplx> modes, const ModeGrid &grid, const Fft &fft);
/// Inverse of modes_to_theta; modes outside the grid are discarded.
std::vector<cplx> theta_to_modes(std::span<const cplx> samples, const ModeGrid &grid, const Fft &fft);

/// |E(theta)|^2 on `theta_count` uniform points.
std::vector<double> intensity_profile(const FieldState &state, std::size_t theta_count);

/// Rotate the field by theta0: E(theta) -> E(theta - theta0).
FieldState rotated(const FieldState &state, double theta0);

} // namespace pdcs
