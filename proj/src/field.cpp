#include "pdcs/field.hpp"

#include "pdcs/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace pdcs {

namespace {
// FFTW planning is not thread-safe; execution with new-array functions is.
std::mutex &planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace

struct Fft::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

Fft::Fft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>())
{
    require(n > 0, "FFT length must be positive");
    std::vector<cplx> scratch(n);
    auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
    const int len = static_cast<int>(n);
    std::lock_guard lock(planner_mutex());
    plans_->fwd = fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft::~Fft()
{
    if (!plans_)
        return;
    std::lock_guard lock(planner_mutex());
    if (plans_->fwd)
        fftw_destroy_plan(plans_->fwd);
    if (plans_->bwd)
        fftw_destroy_plan(plans_->bwd);
}

Fft::Fft(Fft &&) noexcept = default;
Fft &Fft::operator=(Fft &&) noexcept = default;

void Fft::forward(std::span<cplx> data) const
{
    auto *buf = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(plans_->fwd, buf, buf);
}

void Fft::backward(std::span<cplx> data) const
{
    auto *buf = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(plans_->bwd, buf, buf);
}

std::vector<cplx> modes_to_theta(std::span<const cplx> modes, const ModeGrid &grid, const Fft &fft)
{
    const std::size_t n = fft.size();
    require(n >= static_cast<std::size_t>(grid.size()), "theta grid coarser than mode grid");
    std::vector<cplx> out(n, cplx{});
    const long ln = static_cast<long>(n);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const long slot = ((grid.mu(i) % ln) + ln) % ln;
        out[static_cast<std::size_t>(slot)] += modes[i];
    }
    fft.backward(out);
    return out;
}

std::vector<cplx> theta_to_modes(std::span<const cplx> samples, const ModeGrid &grid, const Fft &fft)
{
    const std::size_t n = fft.size();
    std::vector<cplx> work(samples.begin(), samples.end());
    fft.forward(work);
    const double inv = 1.0 / static_cast<double>(n);
    const long ln = static_cast<long>(n);
    std::vector<cplx> out(static_cast<std::size_t>(grid.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const long slot = ((grid.mu(i) % ln) + ln) % ln;
        out[i] = work[static_cast<std::size_t>(slot)] * inv;
    }
    return out;
}

FieldState FieldState::spectral(std::vector<cplx> modes, double time)
{
    FieldState s;
    s.mode_count_ = static_cast<int>(modes.size());
    ModeGrid check(s.mode_count_);
    (void)check;
    s.values_ = std::move(modes);
    s.rep_ = Representation::Spectral;
    s.time_ = time;
    return s;
}

FieldState FieldState::azimuthal(std::vector<cplx> samples, int mode_count, double time)
{
    require(samples.size() >= static_cast<std::size_t>(mode_count),
            "azimuthal sampling must have at least mode_count points");
    FieldState s;
    s.mode_count_ = mode_count;
    ModeGrid check(mode_count);
    (void)check;
    s.values_ = std::move(samples);
    s.rep_ = Representation::Azimuthal;
    s.time_ = time;
    return s;
}

FieldState FieldState::zeros(int mode_count)
{
    return spectral(std::vector<cplx>(static_cast<std::size_t>(mode_count), cplx{}));
}

FieldState FieldState::to_spectral() const
{
    if (rep_ == Representation::Spectral)
        return *this;
    const Fft fft(values_.size());
    return spectral(theta_to_modes(values_, grid(), fft), time_);
}

FieldState FieldState::to_azimuthal(std::size_t theta_count) const
{
    const FieldState s = to_spectral();
    const Fft fft(theta_count);
    return azimuthal(modes_to_theta(s.values_, grid(), fft), mode_count_, time_);
}

double FieldState::norm() const
{
    double acc = 0.0;
    for (const auto &v : values_)
        acc += std::norm(v);
    if (rep_ == Representation::Azimuthal)
        acc /= static_cast<double>(values_.size());
    return std::sqrt(acc);
}

bool FieldState::finite() const
{
    for (const auto &v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return false;
    return true;
}

std::vector<double> intensity_profile(const FieldState &state, std::size_t theta_count)
{
    const FieldState az = state.to_azimuthal(theta_count);
    std::vector<double> out(theta_count);
    for (std::size_t n = 0; n < theta_count; ++n)
        out[n] = std::norm(az.values()[n]);
    return out;
}

FieldState rotated(const FieldState &state, double theta0)
{
    FieldState s = state.to_spectral();
    const ModeGrid g = s.grid();
    for (std::size_t i = 0; i < s.values().size(); ++i)
        s.values()[i] *= std::polar(1.0, -g.mu(i) * theta0);
    return s;
}

} // namespace pdcs
