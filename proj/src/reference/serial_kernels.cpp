#include "pdcs/reference.hpp"

#include "pdcs/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace pdcs::reference {

InteractionMatrices build_GF_direct(const PumpedSpectrum &A, const NormalizedParams &p, PumpCoupling coupling)
{
    p.validate();
    require(A.mode_count == p.mode_count, "pumped spectrum does not match the grid");
    const ModeGrid g = p.grid();
    const Eigen::Index n = g.size();
    const std::vector<cplx> a = coupling == PumpCoupling::Full ? A.amplitudes() : A.comb;

    InteractionMatrices out;
    out.G = Eigen::MatrixXcd::Zero(n, n);
    out.F = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            cplx gs{}, fs{};
            for (Eigen::Index b = 0; b < n; ++b) {
                const Eigen::Index up = b + j - k; // a_{b + j - k} conj(a_b)
                if (up >= 0 && up < n)
                    gs += a[static_cast<std::size_t>(up)] * std::conj(a[static_cast<std::size_t>(b)]);
                const Eigen::Index other = j + k - b; // a_b a_{j + k - b}
                if (other >= 0 && other < n)
                    fs += a[static_cast<std::size_t>(b)] * a[static_cast<std::size_t>(other)];
            }
            out.G(j, k) = -2.0 * gs;
            out.F(j, k) = -fs;
        }
    for (Eigen::Index j = 0; j < n; ++j)
        out.G(j, j) += p.delta_eff + p.d_int[static_cast<std::size_t>(j)];
    if (coupling == PumpCoupling::Parametric) {
        const cplx pair = -2.0 * A.pump_plus * A.pump_minus;
        for (Eigen::Index j = 0; j < n; ++j)
            if (const auto q = g.partner(static_cast<std::size_t>(j)))
                out.F(j, static_cast<Eigen::Index>(*q)) += pair;
    }
    return out;
}

SqueezingSpectrum squeezing_spectrum_serial(const Eigen::MatrixXd &M, const LossMatrix &loss,
                                            const std::vector<double> &omega_grid)
{
    loss.validate();
    const Eigen::Index dim = M.rows();
    SqueezingSpectrum out;
    out.omega = omega_grid;
    out.levels_db.resize(omega_grid.size());
    out.variances.resize(omega_grid.size());
    out.errors.resize(omega_grid.size());
    for (std::size_t w = 0; w < omega_grid.size(); ++w) {
        Eigen::MatrixXcd R = -M.cast<cplx>();
        R.diagonal().array() += cplx(loss.gamma_total, omega_grid[w]);
        const Eigen::FullPivLU<Eigen::MatrixXcd> lu(R);
        if (!lu.isInvertible() || lu.rcond() < 1e-14) {
            out.errors[w] = "singular resolvent";
            continue;
        }
        const Eigen::MatrixXcd S =
            2.0 * loss.gamma_total * lu.inverse() - Eigen::MatrixXcd::Identity(dim, dim);
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
        std::vector<double> v;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double d = svd.singularValues()[i];
            v.push_back(loss.gamma_i / loss.gamma_total + loss.gamma_c / loss.gamma_total * d * d);
        }
        std::sort(v.begin(), v.end());
        out.variances[w] = v;
        for (double x : v)
            out.levels_db[w].push_back(10.0 * std::log10(x));
    }
    return out;
}

std::vector<cplx> integrated_correlation_serial(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega_max,
                                                std::size_t omega_points, bool skip_zero,
                                                const NeutralProjector *neutral)
{
    require(omega_points >= 3 && omega_max > 0.0, "invalid omega grid");
    const Eigen::Index n = loss.n;
    const double dw = omega_max / static_cast<double>(omega_points - 1);
    std::vector<cplx> c(static_cast<std::size_t>(2 * n - 1), cplx{});
    const std::size_t first = skip_zero ? 1 : 0;
    for (std::size_t k = first; k < omega_points; ++k) {
        const AnnihilationTransfer t = neutral ? annihilation_transfer(M, loss, dw * static_cast<double>(k), *neutral)
                                               : annihilation_transfer(M, loss, dw * static_cast<double>(k));
        const double weight = (k == first || k + 1 == omega_points) ? 0.5 * dw : dw;
        const Eigen::MatrixXcd Q2 = t.Q2(), Q3 = t.Q3();
        for (Eigen::Index l = 0; l < n; ++l)
            for (Eigen::Index m = 0; m < n; ++m) {
                cplx s{};
                for (Eigen::Index r = 0; r < n; ++r) {
                    s += Q2(l, r) * std::conj(Q2(m, r));
                    s += std::conj(Q3(l, r) * std::conj(Q3(m, r)));
                }
                c[static_cast<std::size_t>(l - m + n - 1)] += weight * s;
            }
    }
    return c;
}

} // namespace pdcs::reference
