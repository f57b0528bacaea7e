#include "fixtures.hpp"
#include "pdcs/errors.hpp"
#include "pdcs/reference.hpp"

#include <doctest.h>

#include <cmath>

using namespace pdcs;
using fixtures::device;
using fixtures::max_abs;
using fixtures::small_device;

namespace {
const cplx I1{0.0, 1.0};

PumpedSpectrum bt_pumps(const NormalizedParams &p)
{
    return assemble_pumped_spectrum(FieldState::zeros(p.mode_count), p);
}
} // namespace

TEST_CASE("no drive leaves the bare comb")
{
    const NormalizedParams p = small_device(2.0, 0.0);
    FieldState s = init_noise(p, 0.1, 3);
    const ModeGrid g = p.grid();
    s.values()[g.index(15)] = 0.0;
    s.values()[g.index(-15)] = 0.0;
    const PumpedSpectrum A = assemble_pumped_spectrum(s, p);
    CHECK(A.pump_plus == cplx{});
    CHECK(A.pump_minus == cplx{});
    CHECK(A.amplitudes() == s.values());
}

TEST_CASE("below threshold pumps")
{
    const NormalizedParams p = device(0.0, 0.95);
    const PumpedSpectrum A = bt_pumps(p);
    const std::vector<cplx> a = A.amplitudes();
    int nonzero = 0;
    for (const cplx &x : a)
        nonzero += x != cplx{};
    CHECK(nonzero == 2);
    CHECK(a[p.grid().index(63)] != cplx{});
    CHECK(a[p.grid().index(-63)] != cplx{});
    CHECK(std::abs(A.pump_plus * A.pump_minus) == doctest::Approx(0.95 / 2));
    CHECK(std::abs(A.pump_plus) == doctest::Approx(std::abs(A.pump_minus)));
    // the pair term acts as the +nu E* drive
    CHECK(std::abs(2.0 * I1 * A.pump_plus * A.pump_minus - 0.95) < 1e-15);
}

TEST_CASE("comb light on a pump slot is rejected")
{
    const NormalizedParams p = small_device(2.0, 1.1);
    FieldState s = FieldState::zeros(p.mode_count);
    s.values()[p.grid().index(15)] = 0.5;
    CHECK_THROWS_AS(assemble_pumped_spectrum(s, p), ValidationError);
}

TEST_CASE("no comb and no drive leaves only the linear diagonal")
{
    const NormalizedParams p = small_device(1.5, 0.0);
    const InteractionMatrices gf = build_GF(bt_pumps(p), p);
    CHECK(max_abs(gf.F) == 0.0);
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(p.mode_count, p.mode_count);
    for (int j = 0; j < p.mode_count; ++j)
        diag(j, j) = p.delta_eff + p.d_int[static_cast<std::size_t>(j)];
    // sign fixed by the Jacobian equivalence below
    CHECK(max_abs(gf.G - diag) == 0.0);
}

TEST_CASE("pump-only sparsity of F")
{
    const NormalizedParams p = device(0.0, 0.95);
    const ModeGrid g = p.grid();
    for (PumpCoupling c : {PumpCoupling::Parametric, PumpCoupling::Full}) {
        const InteractionMatrices gf = build_GF(bt_pumps(p), p, c);
        bool anti = false, side = false, other = false;
        for (int j = 0; j < p.mode_count; ++j)
            for (int k = 0; k < p.mode_count; ++k) {
                if (gf.F(j, k) == cplx{})
                    continue;
                const int s = g.mu(static_cast<std::size_t>(j)) + g.mu(static_cast<std::size_t>(k));
                if (s == 0)
                    anti = true;
                else if (std::abs(s) == 2 * p.pump_mode_index)
                    side = true;
                else
                    other = true;
            }
        CHECK(anti);
        CHECK_FALSE(other);
        CHECK(side == (c == PumpCoupling::Full));
    }
}

TEST_CASE("single bright mode Kerr linearization")
{
    const NormalizedParams p = small_device(0.0, 0.0);
    const cplx a(0.6, 0.3);
    FieldState s = FieldState::zeros(p.mode_count);
    const std::size_t i0 = p.grid().index(0);
    s.values()[i0] = a;
    const InteractionMatrices gf = build_GF(assemble_pumped_spectrum(s, p), p);
    const auto j = static_cast<Eigen::Index>(i0);
    CHECK(std::abs(std::abs(gf.G(j, j)) - 2.0 * std::norm(a)) < 1e-14);
    CHECK(std::abs(std::abs(gf.F(j, j)) - std::norm(a)) < 1e-14);
    CHECK(std::abs(gf.F(j, j) + a * a) < 1e-14);
}

TEST_CASE("M for trivial and single-mode inputs")
{
    InteractionMatrices zero{Eigen::MatrixXcd::Zero(3, 3), Eigen::MatrixXcd::Zero(3, 3)};
    CHECK(assemble_M(zero).cwiseAbs().maxCoeff() == 0.0);

    const double nu = 0.4;
    InteractionMatrices one{Eigen::MatrixXcd::Zero(1, 1), Eigen::MatrixXcd::Constant(1, 1, I1 * nu)};
    const Eigen::MatrixXd M = assemble_M(one);
    CHECK(M(0, 0) == doctest::Approx(nu));
    CHECK(M(1, 1) == doctest::Approx(-nu));
    CHECK(M(0, 1) == 0.0);
    CHECK(M(1, 0) == 0.0);
}

TEST_CASE("G Hermitian, F symmetric, M Hamiltonian")
{
    const NormalizedParams p = device(12.0, 1.05);
    const InteractionMatrices gf = build_GF(assemble_pumped_spectrum(fixtures::ss_state(), p), p);
    CHECK(max_abs(gf.G - gf.G.adjoint()) < 1e-12);
    CHECK(max_abs(gf.F - gf.F.transpose()) < 1e-12);
    const Eigen::MatrixXd M = assemble_M(gf);
    const Eigen::MatrixXd O = symplectic_form(p.mode_count);
    CHECK((M * O + O * M.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Hamiltonian property for random G and F")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n01;
    const int n = 12;
    Eigen::MatrixXcd X(n, n), Y(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            X(r, c) = {n01(rng), n01(rng)};
            Y(r, c) = {n01(rng), n01(rng)};
        }
    const InteractionMatrices gf{X + X.adjoint(), Y + Y.transpose()};
    const Eigen::MatrixXd M = assemble_M(gf);
    const Eigen::MatrixXd O = symplectic_form(n);
    CHECK((M * O + O * M.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(assemble_M(InteractionMatrices{X, gf.F}), ValidationError);
}

TEST_CASE("Jacobian equivalence")
{
    SUBCASE("below threshold pumps")
    {
        const NormalizedParams p = device(0.0, 0.95);
        const Eigen::MatrixXd M = fixtures::bt_M(p);
        CHECK(jacobian_check(M, FieldState::zeros(p.mode_count), p).deviation < 1e-6);
    }
    SUBCASE("single soliton steady state")
    {
        // the undriven lossy system has no bright fixed point, so a driven single pulse stands in
        const NormalizedParams p = small_device(4.0, 1.2, 64, 30);
        const NewtonResult nr = newton_polish(refined_seed(init_single_soliton(p), p), p, 1e-12);
        REQUIRE(nr.converged);
        const Eigen::MatrixXd M = assemble_M(build_GF(assemble_pumped_spectrum(nr.state, p), p));
        CHECK(jacobian_check(M, nr.state, p).deviation < 1e-5);
    }
    SUBCASE("stable soliton at (12, 1.05)")
    {
        const NormalizedParams p = device(12.0, 1.05);
        CHECK(jacobian_check(fixtures::ss_M(), fixtures::ss_state(), p).deviation < 1e-4);
    }
}

TEST_CASE("Jacobian check needs a fixed point")
{
    const NormalizedParams p = small_device(2.0, 1.1);
    const FieldState s = init_noise(p, 0.2, 4);
    FieldState t = s;
    t.values()[p.grid().index(15)] = 0.0;
    t.values()[p.grid().index(-15)] = 0.0;
    const Eigen::MatrixXd M = assemble_M(build_GF(assemble_pumped_spectrum(t, p), p));
    CHECK_THROWS_AS(jacobian_check(M, t, p), ValidationError);
}

TEST_CASE("selection rules: entries no mode pair reaches are exactly zero")
{
    const NormalizedParams p = small_device(0.0, 0.0);
    const ModeGrid g = p.grid();
    FieldState s = FieldState::zeros(p.mode_count);
    s.values()[g.index(3)] = {0.2, 0.1};
    s.values()[g.index(-4)] = {-0.1, 0.3};
    const InteractionMatrices gf = build_GF(assemble_pumped_spectrum(s, p), p);
    for (int j = 0; j < p.mode_count; ++j)
        for (int k = 0; k < p.mode_count; ++k) {
            const int mj = g.mu(static_cast<std::size_t>(j)), mk = g.mu(static_cast<std::size_t>(k));
            const bool g_allowed = j == k || std::abs(mj - mk) == 7;
            const int s2 = mj + mk;
            const bool f_allowed = s2 == 6 || s2 == -8 || s2 == -1;
            if (!g_allowed)
                CHECK(gf.G(j, k) == cplx{});
            if (!f_allowed)
                CHECK(gf.F(j, k) == cplx{});
        }
}

TEST_CASE("enlarging the grid keeps in-band entries")
{
    const NormalizedParams small = small_device(3.0, 1.1, 40, 15);
    const NormalizedParams big = small_device(3.0, 1.1, 60, 15);
    FieldState s = init_noise(small, 0.2, 8);
    s.values()[small.grid().index(15)] = 0.0;
    s.values()[small.grid().index(-15)] = 0.0;
    FieldState S = FieldState::zeros(60);
    for (int mu = -20; mu < 20; ++mu)
        S.values()[S.grid().index(mu)] = s.values()[s.grid().index(mu)];
    const InteractionMatrices a = build_GF(assemble_pumped_spectrum(s, small), small);
    const InteractionMatrices b = build_GF(assemble_pumped_spectrum(S, big), big);
    double dg = 0.0, df = 0.0;
    for (int j = -20; j < 20; ++j)
        for (int k = -20; k < 20; ++k) {
            const auto sj = static_cast<Eigen::Index>(small.grid().index(j)), sk = static_cast<Eigen::Index>(small.grid().index(k));
            const auto bj = static_cast<Eigen::Index>(big.grid().index(j)), bk = static_cast<Eigen::Index>(big.grid().index(k));
            if (std::abs(j + k) < 20)
                df = std::max(df, std::abs(a.F(sj, sk) - b.F(bj, bk)));
            dg = std::max(dg, std::abs(a.G(sj, sk) - b.G(bj, bk)));
        }
    CHECK(dg < 1e-13);
    CHECK(df < 1e-13);
}

TEST_CASE("FFT convolutions agree with direct sums")
{
    const NormalizedParams p = device(12.0, 1.05);
    const PumpedSpectrum A = assemble_pumped_spectrum(fixtures::ss_state(), p);
    for (PumpCoupling c : {PumpCoupling::Parametric, PumpCoupling::Full}) {
        const InteractionMatrices fast = build_GF(A, p, c);
        const InteractionMatrices slow = reference::build_GF_direct(A, p, c);
        CHECK(max_abs(fast.G - slow.G) < 1e-12 * max_abs(slow.G));
        CHECK(max_abs(fast.F - slow.F) < 1e-12 * std::max(1.0, max_abs(slow.F)));
    }
}

TEST_CASE("pump coupling names")
{
    CHECK(pump_coupling_from_string("full") == PumpCoupling::Full);
    CHECK(pump_coupling_from_string(to_string(PumpCoupling::Parametric)) == PumpCoupling::Parametric);
    CHECK_THROWS_AS(pump_coupling_from_string("none"), ValidationError);
}
