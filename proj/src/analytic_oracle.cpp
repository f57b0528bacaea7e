#include "pdcs/analytic_oracle.hpp"

#include "pdcs/errors.hpp"
#include "pdcs/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdcs {

void PairSystem::validate() const
{
    require(nu_mag >= 0.0 && nu_mag < 1.0, "analytic pair solution needs 0 <= |nu| < 1 (below threshold)");
    require(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
    require(std::isfinite(delta), "detuning must be finite");
}

VariancePair opa_output_spectrum(const PairSystem &ps, double omega)
{
    ps.validate();
    // each symmetric/antisymmetric pair combination obeys the single-mode generator
    // [[nu, delta], [-delta, -nu]]; S = 2 (1 + i w - M1)^{-1} - I
    const cplx s(1.0, omega);
    const double nu = ps.nu_mag, d = ps.delta;
    const cplx det = s * s - nu * nu + d * d;
    const cplx s00 = 2.0 * (s + nu) / det - 1.0;
    const cplx s01 = 2.0 * d / det;
    const cplx s10 = -2.0 * d / det;
    const cplx s11 = 2.0 * (s - nu) / det - 1.0;
    const double fro = std::norm(s00) + std::norm(s01) + std::norm(s10) + std::norm(s11);
    const double adet = std::norm(s00 * s11 - s01 * s10);
    const double disc = std::sqrt(std::max(0.0, fro * fro - 4.0 * adet));
    const double big = 0.5 * (fro + disc);
    // small root from the product to avoid cancellation
    const double small = big > 0.0 ? adet / big : 0.0;
    VariancePair v;
    v.min = (1.0 - ps.eta) + ps.eta * small;
    v.max = (1.0 - ps.eta) + ps.eta * big;
    return v;
}

PairSystem pair_system(const NormalizedParams &p, int mu)
{
    const ModeGrid g = p.grid();
    require(g.contains(mu) && g.contains(-mu), "pair (mu, -mu) must lie on the grid");
    PairSystem ps;
    ps.mu = mu;
    ps.delta = p.delta_eff + 0.5 * (p.dispersion(mu) + p.dispersion(-mu));
    ps.nu_mag = std::abs(p.nu);
    ps.eta = p.gamma_c / p.gamma_total;
    return ps;
}

std::vector<double> below_threshold_levels(const NormalizedParams &p, double omega)
{
    const ModeGrid g = p.grid();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * g.size()));
    for (int mu = 0; mu <= g.mu_max(); ++mu) {
        const VariancePair v = opa_output_spectrum(pair_system(p, mu), omega);
        const int copies = mu == 0 ? 1 : 2;
        for (int c = 0; c < copies; ++c) {
            out.push_back(v.min);
            out.push_back(v.max);
        }
    }
    // modes without a conjugate partner see no drive
    while (out.size() < static_cast<std::size_t>(2 * g.size()))
        out.push_back(1.0);
    std::sort(out.begin(), out.end());
    return out;
}

double phase_matched_detuning(int mu, const NormalizedParams &p)
{
    const ModeGrid g = p.grid();
    require(g.contains(mu) && g.contains(-mu), "pair (mu, -mu) must lie on the grid");
    return -0.5 * (p.dispersion(mu) + p.dispersion(-mu));
}

Eigen::MatrixXd below_threshold_M(const NormalizedParams &p, PumpCoupling coupling)
{
    const PumpedSpectrum A = assemble_pumped_spectrum(FieldState::zeros(p.mode_count), p);
    return assemble_M(build_GF(A, p, coupling));
}

DetuningScanResult detuning_scan(int mu, const NormalizedParams &p, const std::vector<double> &deltas,
                                 PumpCoupling coupling)
{
    require(!deltas.empty(), "detuning grid must be non-empty");
    const ModeGrid g = p.grid();
    require(g.contains(mu) && g.contains(-mu), "pair (mu, -mu) must lie on the grid");
    const LossMatrix loss = LossMatrix::from(p);
    const std::size_t n = deltas.size();

    DetuningScanResult out;
    out.deltas = deltas;
    out.variances.assign(n, std::numeric_limits<double>::infinity());
    std::vector<Supermode> best_modes(n);
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < count; ++t) {
        const std::size_t i = static_cast<std::size_t>(t);
        NormalizedParams q = p;
        q.delta_eff = deltas[i];
        const FrequencyDecomposition dec = decompose(below_threshold_M(q, coupling), loss, 0.0);
        // modes are ascending in variance, so the first on +-mu is the mode-mu squeezing
        const std::vector<Supermode> modes = extract_supermodes(dec, g, 2 * g.size());
        for (const Supermode &sm : modes) {
            const std::vector<double> w = sm.weights();
            const double on = w[g.index(mu)] + (mu != 0 ? w[g.index(-mu)] : 0.0);
            if (on > 0.5) {
                out.variances[i] = sm.variance;
                best_modes[i] = sm;
                break;
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (out.variances[i] < out.variances[best])
            best = i;
    out.best_delta = deltas[best];
    out.best_variance = out.variances[best];
    out.winner = best_modes[best];
    return out;
}

} // namespace pdcs
