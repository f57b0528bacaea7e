#include "pdcs/grid_dispersion.hpp"

#include "pdcs/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pdcs {

ModeGrid::ModeGrid(int mode_count) : n_(mode_count)
{
    require(mode_count >= 4 && mode_count % 2 == 0, "mode_count must be even and >= 4");
}

std::size_t ModeGrid::index(int mu) const
{
    if (!contains(mu)) {
        std::ostringstream os;
        os << "mode " << mu << " outside grid [" << mu_min() << ", " << mu_max() << "]";
        throw ValidationError(os.str());
    }
    return static_cast<std::size_t>(mu - mu_min());
}

std::optional<std::size_t> ModeGrid::partner(std::size_t index) const noexcept
{
    const int m = -mu(index);
    if (!contains(m))
        return std::nullopt;
    return static_cast<std::size_t>(m - mu_min());
}

void PhysicalParams::validate() const
{
    require(std::isfinite(fsr_hz) && fsr_hz > 0.0, "physical.fsr_hz must be finite and > 0");
    require(std::isfinite(finesse) && finesse > 0.0, "physical.finesse must be finite and > 0");
    require(std::isfinite(d2_hz) && std::isfinite(d4_hz), "dispersion coefficients must be finite");
    for (const auto &[order, value] : extra_orders_hz) {
        require(order >= 2, "dispersion orders must be >= 2");
        require(std::isfinite(value), "dispersion coefficients must be finite");
    }
    require(std::isfinite(kerr_coeff) && std::isfinite(cavity_length_m),
            "kerr_coeff and cavity_length_m must be finite");
    require(mode_count >= 4 && mode_count % 2 == 0, "physical.mode_count must be even and >= 4");
    const ModeGrid grid(mode_count);
    require(pump_mode_index > grid.mu_min() && pump_mode_index < grid.mu_max() &&
                -pump_mode_index > grid.mu_min() && -pump_mode_index < grid.mu_max(),
            "physical.pump_mode_index must lie strictly inside the mode range");
}

double PhysicalParams::roundtrip_loss() const { return std::numbers::pi / finesse; }

std::map<int, double> PhysicalParams::dispersion_hz() const
{
    std::map<int, double> out = extra_orders_hz;
    out[2] = d2_hz;
    out[4] = d4_hz;
    return out;
}

std::map<int, double> normalized_coefficients(const PhysicalParams &p)
{
    const double scale = p.roundtrip_time_s() * 2.0 * std::numbers::pi / p.roundtrip_loss();
    std::map<int, double> d;
    for (const auto &[order, hz] : p.dispersion_hz())
        d[order] = scale * hz;
    return d;
}

std::map<int, double> physical_coefficients(const std::map<int, double> &d, double fsr_hz,
                                            double finesse)
{
    const double gamma = std::numbers::pi / finesse;
    const double scale = (1.0 / fsr_hz) * 2.0 * std::numbers::pi / gamma;
    std::map<int, double> out;
    for (const auto &[order, value] : d)
        out[order] = value / scale;
    return out;
}

double field_scale(const PhysicalParams &p)
{
    return std::sqrt(p.kerr_coeff * p.cavity_length_m / p.roundtrip_loss());
}

std::vector<double> dispersion_profile(const std::map<int, double> &d_coeffs, const ModeGrid &grid)
{
    for (const auto &[order, value] : d_coeffs) {
        require(order >= 2, "dispersion order must be >= 2, got " + std::to_string(order));
        require(std::isfinite(value), "dispersion coefficient must be finite");
    }
    std::vector<double> out(static_cast<std::size_t>(grid.size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double mu = grid.mu(i);
        double acc = 0.0;
        for (const auto &[order, value] : d_coeffs)
            acc += value * std::pow(mu, order) / std::tgamma(order + 1.0);
        out[i] = acc;
    }
    return out;
}

void NormalizedParams::validate() const
{
    const ModeGrid g(mode_count);
    require(d_int.size() == static_cast<std::size_t>(mode_count), "d_int size must equal mode_count");
    require(d_int[g.index(0)] == 0.0, "d_int(0) must be exactly zero");
    require(std::isfinite(delta_eff), "delta_eff must be finite");
    require(std::isfinite(nu.real()) && std::isfinite(nu.imag()), "nu must be finite");
    require(gamma_c > 0.0 && gamma_i >= 0.0, "loss rates must satisfy gamma_c > 0, gamma_i >= 0");
    require(std::abs(gamma_c + gamma_i - gamma_total) < 1e-12 * gamma_total,
            "gamma_c + gamma_i must equal gamma_total");
    require(g.contains(pump_mode_index) && g.contains(-pump_mode_index),
            "pump_mode_index outside the grid");
}

NormalizedParams normalize(const PhysicalParams &p, double delta_eff, cplx nu, double overcoupling_ratio)
{
    p.validate();
    require(std::isfinite(delta_eff), "delta_eff must be finite");
    require(std::isfinite(nu.real()) && std::isfinite(nu.imag()), "nu must be finite");
    require(std::isfinite(overcoupling_ratio) && overcoupling_ratio > 0.0 && overcoupling_ratio <= 1.0,
            "overcoupling_ratio must lie in (0, 1]");

    NormalizedParams out;
    out.mode_count = p.mode_count;
    out.pump_mode_index = p.pump_mode_index;
    out.d_int = dispersion_profile(normalized_coefficients(p), ModeGrid(p.mode_count));
    out.delta_eff = delta_eff;
    out.nu = nu;
    out.gamma_total = 1.0;
    out.gamma_c = overcoupling_ratio;
    out.gamma_i = 1.0 - overcoupling_ratio;
    return out;
}

NormalizedParams with_dispersion(const NormalizedParams &p, const std::map<int, double> &d_coeffs)
{
    NormalizedParams out = p;
    out.d_int = dispersion_profile(d_coeffs, p.grid());
    return out;
}

std::vector<double> ZeroCrossingReport::sign_changes() const
{
    std::vector<double> out;
    for (const auto &c : crossings)
        if (c.kind == ZeroCrossing::Kind::SignChange)
            out.push_back(c.mu);
    return out;
}

ZeroCrossingReport zero_crossings(std::span<const double> d_int, int mu_min)
{
    ZeroCrossingReport report;
    bool all_zero = true;
    for (double v : d_int)
        all_zero = all_zero && v == 0.0;
    if (all_zero) {
        report.degenerate = true;
        report.warning = "dispersion profile is identically zero; every mode is degenerate";
        return report;
    }

    const std::size_t n = d_int.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = mu_min + static_cast<double>(i);
        if (d_int[i] == 0.0) {
            // Walk to the nearest nonzero neighbours to decide whether the sign flips.
            std::size_t l = i, r = i;
            while (l > 0 && d_int[l] == 0.0)
                --l;
            while (r + 1 < n && d_int[r] == 0.0)
                ++r;
            const bool flips = d_int[l] != 0.0 && d_int[r] != 0.0 && (d_int[l] > 0.0) != (d_int[r] > 0.0);
            report.crossings.push_back({mu, flips ? ZeroCrossing::Kind::SignChange : ZeroCrossing::Kind::Touch});
            continue;
        }
        if (i + 1 < n && d_int[i + 1] != 0.0 && (d_int[i] > 0.0) != (d_int[i + 1] > 0.0)) {
            const double t = d_int[i] / (d_int[i] - d_int[i + 1]);
            report.crossings.push_back({mu + t, ZeroCrossing::Kind::SignChange});
        }
    }
    return report;
}

} // namespace pdcs
