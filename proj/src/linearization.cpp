#include "pdcs/linearization.hpp"

#include "pdcs/errors.hpp"
#include "pdcs/mean_field.hpp"

#include <algorithm>
#include <cmath>

namespace pdcs {

namespace {
constexpr cplx I{0.0, 1.0};
}

std::string to_string(PumpCoupling c)
{
    return c == PumpCoupling::Full ? "full" : "parametric";
}

PumpCoupling pump_coupling_from_string(const std::string &s)
{
    if (s == "parametric")
        return PumpCoupling::Parametric;
    if (s == "full")
        return PumpCoupling::Full;
    throw ValidationError("unknown pump coupling '" + s + "' (expected parametric or full)");
}

std::vector<cplx> PumpedSpectrum::amplitudes() const
{
    std::vector<cplx> a = comb;
    const ModeGrid g(mode_count);
    if (g.contains(pump_mode_index))
        a[g.index(pump_mode_index)] += pump_plus;
    if (g.contains(-pump_mode_index))
        a[g.index(-pump_mode_index)] += pump_minus;
    return a;
}

PumpedSpectrum assemble_pumped_spectrum(const FieldState &steady, const NormalizedParams &p, double overlap_tol)
{
    p.validate();
    const FieldState s = steady.to_spectral();
    require(s.mode_count() == p.mode_count, "steady state grid does not match parameters");
    const ModeGrid g = p.grid();
    require(p.pump_mode_index > 0 && g.contains(p.pump_mode_index) && g.contains(-p.pump_mode_index),
            "pump modes +-" + std::to_string(p.pump_mode_index) + " must lie on the grid");

    PumpedSpectrum out;
    out.comb = s.values();
    out.pump_mode_index = p.pump_mode_index;
    out.mode_count = p.mode_count;

    double peak = 1.0;
    for (const auto &a : out.comb)
        peak = std::max(peak, std::abs(a));
    for (int mu : {p.pump_mode_index, -p.pump_mode_index}) {
        const double a = std::abs(out.comb[g.index(mu)]);
        if (a > overlap_tol * peak)
            throw ValidationError("comb amplitude " + std::to_string(a) + " at pump mode " + std::to_string(mu) +
                                  " overlaps the pump");
        out.comb[g.index(mu)] = 0.0;
    }

    const double mag = std::sqrt(std::abs(p.nu) / 2.0);
    const cplx half_phase = std::polar(1.0, 0.5 * std::arg(p.nu));
    out.pump_plus = -I * mag * half_phase;
    out.pump_minus = mag * half_phase;
    return out;
}

namespace {

/// Linear autocorrelation C[q + n - 1] = sum_b a_{b+q} conj(a_b) and self-convolution
/// P[s] = sum_{a+b=s} a_a a_b, both exact through a 2n-point transform.
void convolutions(const std::vector<cplx> &a, std::vector<cplx> &corr, std::vector<cplx> &prod)
{
    const std::size_t n = a.size();
    const std::size_t L = 2 * n;
    const Fft fft(L);
    std::vector<cplx> fa(L, cplx{});
    std::copy(a.begin(), a.end(), fa.begin());
    fft.forward(fa);
    std::vector<cplx> c(L), s(L);
    for (std::size_t k = 0; k < L; ++k) {
        c[k] = fa[k] * std::conj(fa[k]);
        s[k] = fa[k] * fa[k];
    }
    fft.backward(c);
    fft.backward(s);
    const double inv = 1.0 / static_cast<double>(L);
    // structural support, so entries no (m, n) pair can reach are exactly zero
    std::vector<char> nz(n), corr_support(2 * n - 1, 0), prod_support(2 * n - 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        nz[i] = a[i] != cplx{};
    for (std::size_t i = 0; i < n; ++i) {
        if (!nz[i])
            continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (!nz[j])
                continue;
            corr_support[i + n - 1 - j] = 1;
            prod_support[i + j] = 1;
        }
    }
    corr.assign(2 * n - 1, cplx{});
    prod.assign(2 * n - 1, cplx{});
    for (std::size_t q = 0; q < 2 * n - 1; ++q) {
        // lag q - (n - 1), stored circularly
        const long lag = static_cast<long>(q) - static_cast<long>(n - 1);
        const std::size_t slot = static_cast<std::size_t>((lag + static_cast<long>(L)) % static_cast<long>(L));
        if (corr_support[q])
            corr[q] = c[slot] * inv;
        if (prod_support[q])
            prod[q] = s[q] * inv;
    }
}

} // namespace

InteractionMatrices build_GF(const PumpedSpectrum &A, const NormalizedParams &p, PumpCoupling coupling)
{
    p.validate();
    require(A.mode_count == p.mode_count && A.comb.size() == static_cast<std::size_t>(p.mode_count),
            "pumped spectrum does not match the grid");
    const ModeGrid g = p.grid();
    const Eigen::Index n = g.size();

    const std::vector<cplx> source = coupling == PumpCoupling::Full ? A.amplitudes() : A.comb;
    std::vector<cplx> corr, prod;
    convolutions(source, corr, prod);

    InteractionMatrices out;
    out.G.resize(n, n);
    out.F.resize(n, n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            out.G(j, k) = -2.0 * corr[static_cast<std::size_t>(j - k + n - 1)];
            out.F(j, k) = -prod[static_cast<std::size_t>(j + k)];
        }
        out.G(j, j) += p.delta_eff + p.d_int[static_cast<std::size_t>(j)];
    }

    if (coupling == PumpCoupling::Parametric) {
        // pump pair A_{+p} A_{-p} entering every (j, -j) slot twice (m, n and n, m)
        const cplx pair = -2.0 * A.pump_plus * A.pump_minus;
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto partner = g.partner(static_cast<std::size_t>(j));
            if (partner)
                out.F(j, static_cast<Eigen::Index>(*partner)) += pair;
        }
    }
    return out;
}

Eigen::MatrixXd assemble_M(const InteractionMatrices &gf)
{
    const Eigen::Index n = gf.G.rows();
    require(gf.G.cols() == n && gf.F.rows() == n && gf.F.cols() == n, "G and F must be square and equal in size");
    const double scale = std::max({1.0, gf.G.cwiseAbs().maxCoeff(), gf.F.cwiseAbs().maxCoeff()});
    require((gf.G - gf.G.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "G is not Hermitian");
    require((gf.F - gf.F.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, "F is not symmetric");

    const Eigen::MatrixXcd sum = gf.G + gf.F;
    const Eigen::MatrixXcd diff = gf.G - gf.F;
    Eigen::MatrixXd M(2 * n, 2 * n);
    M.topLeftCorner(n, n) = sum.imag();
    M.topRightCorner(n, n) = diff.real();
    M.bottomLeftCorner(n, n) = -sum.real();
    M.bottomRightCorner(n, n) = -sum.imag().transpose();
    return M;
}

Eigen::MatrixXd symplectic_form(Eigen::Index n)
{
    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    O.topRightCorner(n, n).setIdentity();
    O.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return O;
}

Eigen::MatrixXd numerical_jacobian(const FieldState &state, const NormalizedParams &p, double h)
{
    require(h > 0.0, "finite-difference step must be positive");
    const FieldState s = state.to_spectral();
    const PdnlseModel model(p);
    const std::vector<cplx> &x0 = s.values();
    const Eigen::Index n = static_cast<Eigen::Index>(x0.size());
    Eigen::MatrixXd J(2 * n, 2 * n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < 2 * n; ++c) {
        std::vector<cplx> xp = x0, xm = x0;
        const std::size_t i = static_cast<std::size_t>(c % n);
        const cplx dir = c < n ? cplx(h, 0.0) : cplx(0.0, h);
        xp[i] += dir;
        xm[i] -= dir;
        const std::vector<cplx> fp = model.rhs(xp);
        const std::vector<cplx> fm = model.rhs(xm);
        for (Eigen::Index r = 0; r < n; ++r) {
            const cplx d = (fp[static_cast<std::size_t>(r)] - fm[static_cast<std::size_t>(r)]) / (2.0 * h);
            J(r, c) = d.real();
            J(n + r, c) = d.imag();
        }
    }
    return J;
}

JacobianCheck jacobian_check(const Eigen::MatrixXd &M, const FieldState &steady, const NormalizedParams &p,
                             double h, double fixed_point_tol)
{
    const FieldState s = steady.to_spectral();
    const Eigen::Index n = p.mode_count;
    require(M.rows() == 2 * n && M.cols() == 2 * n, "M does not match the grid");
    {
        const std::vector<cplx> r = pdnlse_rhs_modes(s.values(), p);
        double nr = 0.0, nx = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            nr += std::norm(r[i]);
            nx += std::norm(s.values()[i]);
        }
        const double res = nx > 0.0 ? std::sqrt(nr / nx) : std::sqrt(nr);
        if (!(res < fixed_point_tol))
            throw ValidationError("jacobian_check needs a fixed point; residual " + std::to_string(res));
    }

    const Eigen::MatrixXd J = numerical_jacobian(s, p, h);
    const ModeGrid g = p.grid();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int mu = g.mu(static_cast<std::size_t>(i));
        if (std::abs(mu) != p.pump_mode_index)
            keep.push_back(i);
    }
    double worst = 0.0, scale = 0.0;
    for (int br = 0; br < 2; ++br)
        for (int bc = 0; bc < 2; ++bc)
            for (Eigen::Index r : keep)
                for (Eigen::Index c : keep) {
                    const Eigen::Index rr = br * n + r, cc = bc * n + c;
                    const double lin = M(rr, cc) - (rr == cc ? p.gamma_total : 0.0);
                    worst = std::max(worst, std::abs(lin - J(rr, cc)));
                    scale = std::max(scale, std::abs(J(rr, cc)));
                }
    JacobianCheck out;
    out.scale = scale;
    out.deviation = scale > 0.0 ? worst / scale : worst;
    out.compared_modes = static_cast<Eigen::Index>(keep.size());
    return out;
}

} // namespace pdcs
