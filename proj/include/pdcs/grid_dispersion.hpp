#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdcs {

using cplx = std::complex<double>;

/// Integer mode grid mu = -N/2 ... N/2 - 1 relative to the signal frequency.
class ModeGrid {
public:
    explicit ModeGrid(int mode_count);

    int size() const noexcept { return n_; }
    int mu_min() const noexcept { return -n_ / 2; }
    int mu_max() const noexcept { return n_ / 2 - 1; }
    bool contains(int mu) const noexcept { return mu >= mu_min() && mu <= mu_max(); }
    std::size_t index(int mu) const;
    int mu(std::size_t index) const noexcept { return mu_min() + static_cast<int>(index); }

    /// Index of the conjugate partner -mu, empty for the unpaired edge mode mu_min.
    std::optional<std::size_t> partner(std::size_t index) const noexcept;

    bool operator==(const ModeGrid &) const = default;

private:
    int n_;
};

/// Device description in SI units; dispersion coefficients are D_k / 2pi in Hz.
struct PhysicalParams {
    double fsr_hz = 1.0e12;
    double finesse = 3000.0;
    double d2_hz = 0.5e9;
    double d4_hz = -1.645e6;
    /// Optional odd/extra orders (k -> D_k / 2pi). Orders 2 and 4 above take precedence.
    std::map<int, double> extra_orders_hz;
    double kerr_coeff = 1.0;             // gamma, 1/(W m)
    double cavity_length_m = 1.445e-4;   // 2 pi * 23 um
    int pump_mode_index = 63;
    int mode_count = 200;

    void validate() const;
    double roundtrip_time_s() const { return 1.0 / fsr_hz; }
    /// Total amplitude decay per roundtrip, pi / finesse.
    double roundtrip_loss() const;
    /// All dispersion orders k -> D_k / 2pi (Hz).
    std::map<int, double> dispersion_hz() const;
};

/// Dimensionless system: time in units of t_R / Gamma, rates relative to the total decay.
struct NormalizedParams {
    std::vector<double> d_int; // per grid index
    double delta_eff = 0.0;
    cplx nu{0.0, 0.0};
    double gamma_total = 1.0;
    double gamma_c = 1.0 / 1.01;
    double gamma_i = 0.01 / 1.01;
    int pump_mode_index = 63;
    int mode_count = 200;

    ModeGrid grid() const { return ModeGrid(mode_count); }
    double dispersion(int mu) const { return d_int[grid().index(mu)]; }
    double coupling_efficiency() const { return gamma_c / gamma_total; }
    void validate() const;
};

/// Normalized dispersion coefficients d_n = t_R * 2pi * D_n/2pi / Gamma.
std::map<int, double> normalized_coefficients(const PhysicalParams &p);

/// Inverse of normalized_coefficients: recovers D_n / 2pi in Hz.
std::map<int, double> physical_coefficients(const std::map<int, double> &d, double fsr_hz,
                                            double finesse);

/// Scale that maps a physical intracavity field (sqrt(W)) to the normalized one.
double field_scale(const PhysicalParams &p);

/// d_int(mu) = sum_n d_n mu^n / n! on every mode of the grid.
std::vector<double> dispersion_profile(const std::map<int, double> &d_coeffs, const ModeGrid &grid);

/// `overcoupling_ratio` is the escape efficiency gamma_c / (gamma_c + gamma_i).
NormalizedParams normalize(const PhysicalParams &p, double delta_eff, cplx nu,
                           double overcoupling_ratio = 1.0 / 1.01);

/// Same system with the chosen dispersion orders removed (e.g. quartic off).
NormalizedParams with_dispersion(const NormalizedParams &p, const std::map<int, double> &d_coeffs);

struct ZeroCrossing {
    enum class Kind { SignChange, Touch };
    double mu;
    Kind kind;
};

struct ZeroCrossingReport {
    std::vector<ZeroCrossing> crossings; // ascending in mu
    bool degenerate = false;             // profile identically zero
    std::string warning;

    /// Only the sign changes, i.e. genuine crossings from anomalous to normal dispersion.
    std::vector<double> sign_changes() const;
};

/// Linear-interpolated zeros of d_int; grid points that are exactly zero without a
/// sign change (mu = 0 for even profiles) are reported as Touch.
ZeroCrossingReport zero_crossings(std::span<const double> d_int, int mu_min);

} // namespace pdcs
