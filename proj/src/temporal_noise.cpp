#include "pdcs/temporal_noise.hpp"

#include "pdcs/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace pdcs {

Eigen::MatrixXcd ladder_basis(Eigen::Index n)
{
    const double s = 1.0 / std::numbers::sqrt2;
    const cplx i(0.0, 1.0);
    Eigen::MatrixXcd O = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        O(k, k) = s;
        O(k, n + k) = s;
        O(n + k, k) = -i * s;
        O(n + k, n + k) = i * s;
    }
    return O;
}

namespace {

AnnihilationTransfer solve_transfer(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega,
                                    const Eigen::MatrixXcd *P, double rcond_min)
{
    loss.validate();
    require(M.rows() == 2 * loss.n && M.cols() == 2 * loss.n, "M does not match the loss matrix");
    require(std::isfinite(omega), "omega must be finite");
    const Eigen::Index n = loss.n;
    const Eigen::MatrixXcd O = ladder_basis(n);
    Eigen::MatrixXcd A = -(O.adjoint() * M.cast<cplx>() * O);
    A.diagonal().array() += cplx(loss.gamma_total, omega);
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
    if (P && P->size() > 0) {
        // P commutes with A; shifting the neutral eigenvalue off zero leaves the complement untouched
        A += *P;
        rhs -= *P;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double rc = lu.rcond();
    if (!(rc >= rcond_min))
        throw SingularSystemError(omega, rc);
    AnnihilationTransfer out;
    out.omega = omega;
    out.n = n;
    out.Q = lu.solve(rhs) * std::sqrt(2.0 * loss.gamma_total);
    return out;
}

} // namespace

AnnihilationTransfer annihilation_transfer(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega,
                                           double rcond_min)
{
    return solve_transfer(M, loss, omega, nullptr, rcond_min);
}

AnnihilationTransfer annihilation_transfer(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega,
                                           const NeutralProjector &neutral, double rcond_min)
{
    return solve_transfer(M, loss, omega, &neutral.P, rcond_min);
}

NeutralProjector neutral_projector(const Eigen::MatrixXd &M, const LossMatrix &loss, double rel_tol)
{
    loss.validate();
    require(M.rows() == 2 * loss.n && M.cols() == 2 * loss.n, "M does not match the loss matrix");
    require(rel_tol > 0.0, "neutral tolerance must be positive");
    const Eigen::Index m = M.rows();
    const Eigen::MatrixXd X = M - loss.gamma_total * Eigen::MatrixXd::Identity(m, m);
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd &s = svd.singularValues(); // descending
    NeutralProjector out;
    out.smallest_singular_value = s(m - 1);
    const double thr = rel_tol * std::max(1.0, s(0));
    Eigen::Index k = 0;
    while (k < m && s(m - 1 - k) < thr)
        ++k;
    out.rank = static_cast<int>(k);
    if (k == 0)
        return out;
    const Eigen::MatrixXd R = svd.matrixV().rightCols(k);
    const Eigen::MatrixXd L = svd.matrixU().rightCols(k);
    const Eigen::MatrixXd LR = L.transpose() * R;
    const Eigen::JacobiSVD<Eigen::MatrixXd> check(LR);
    if (check.singularValues()(k - 1) < 1.0e-8)
        throw NumericalError("neutral eigenvalue of M - Gamma is defective; no spectral projector");
    const Eigen::MatrixXd P = R * LR.inverse() * L.transpose();
    const Eigen::MatrixXcd O = ladder_basis(loss.n);
    out.P = O.adjoint() * P.cast<cplx>() * O;
    return out;
}

namespace {

/// c_q (index q + n - 1) of Q2 Q2^dagger(w) + conj(Q3 Q3^dagger(w)), i.e. the +w and -w samples.
std::vector<cplx> mirrored_diagonal_sums(const AnnihilationTransfer &t)
{
    const Eigen::Index n = t.n;
    const Eigen::MatrixXcd Q2 = t.Q2();
    const Eigen::MatrixXcd Q3 = t.Q3();
    const Eigen::MatrixXcd N = Q2 * Q2.adjoint() + (Q3 * Q3.adjoint()).conjugate();
    std::vector<cplx> c(static_cast<std::size_t>(2 * n - 1), cplx{});
    for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index m = 0; m < n; ++m)
            c[static_cast<std::size_t>(l - m + n - 1)] += N(l, m);
    return c;
}

/// Trapezoid over samples k = first..last of spacing dw, endpoint weights halved.
std::vector<cplx> integrate_samples(const Eigen::MatrixXd &M, const LossMatrix &loss, double dw, std::size_t first,
                                    std::size_t last, std::vector<std::string> *skipped, const NeutralProjector *neutral)
{
    const std::size_t count = last - first + 1;
    std::vector<std::vector<cplx>> parts(count);
    std::vector<std::string> errs(count);
    const long long total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < total; ++t) {
        const std::size_t k = first + static_cast<std::size_t>(t);
        try {
            const double w = dw * static_cast<double>(k);
            parts[static_cast<std::size_t>(t)] = mirrored_diagonal_sums(
                neutral ? annihilation_transfer(M, loss, w, *neutral) : annihilation_transfer(M, loss, w));
        } catch (const SingularSystemError &e) {
            errs[static_cast<std::size_t>(t)] = e.what();
        }
    }
    std::vector<cplx> acc(static_cast<std::size_t>(2 * loss.n - 1), cplx{});
    // fixed summation order keeps the result independent of the thread count
    for (std::size_t t = 0; t < count; ++t) {
        if (!errs[t].empty()) {
            if (skipped)
                skipped->push_back(errs[t]);
            continue;
        }
        const double w = (t == 0 || t + 1 == count) ? 0.5 * dw : dw;
        for (std::size_t q = 0; q < acc.size(); ++q)
            acc[q] += w * parts[t][q];
    }
    return acc;
}

} // namespace

std::vector<cplx> integrated_correlation(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega_max,
                                         std::size_t omega_points, bool skip_zero, std::vector<std::string> *skipped,
                                         const NeutralProjector *neutral)
{
    require(omega_max > 0.0, "omega_max must be positive");
    require(omega_points >= 3, "need at least three omega samples");
    const double dw = omega_max / static_cast<double>(omega_points - 1);
    return integrate_samples(M, loss, dw, skip_zero ? 1 : 0, omega_points - 1, skipped, neutral);
}

std::vector<cplx> envelope_from_correlation(const std::vector<cplx> &c, std::size_t theta_points)
{
    require(theta_points > 0, "theta grid must be non-empty");
    require(c.size() % 2 == 1, "correlation vector must have odd length 2n - 1");
    const long half = static_cast<long>(c.size() / 2);
    const long T = static_cast<long>(theta_points);
    std::vector<cplx> b(theta_points, cplx{});
    for (long idx = 0; idx < static_cast<long>(c.size()); ++idx) {
        const long q = idx - half;
        b[static_cast<std::size_t>(((q % T) + T) % T)] += c[static_cast<std::size_t>(idx)];
    }
    Fft(theta_points).backward(b);
    return b;
}

namespace {

NoiseEnvelope to_envelope(const std::vector<cplx> &c, std::size_t theta_points)
{
    NoiseEnvelope env;
    const std::vector<cplx> v = envelope_from_correlation(c, theta_points);
    env.theta.resize(theta_points);
    env.values.resize(theta_points);
    for (std::size_t t = 0; t < theta_points; ++t) {
        env.theta[t] = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(theta_points);
        env.values[t] = v[t].real();
        env.max_imaginary = std::max(env.max_imaginary, std::abs(v[t].imag()));
    }
    return env;
}

} // namespace

NoiseEnvelope photon_envelope(const Eigen::MatrixXd &M, const LossMatrix &loss, const ModeGrid &grid,
                              const EnvelopeOptions &opt)
{
    require(grid.size() == loss.n, "grid does not match the loss matrix");
    require(opt.theta_points >= static_cast<std::size_t>(grid.size()), "theta grid must have at least N points");
    require(opt.convergence_tol > 0.0, "convergence tolerance must be positive");
    std::optional<NeutralProjector> neutral;
    if (opt.remove_neutral_modes)
        neutral = neutral_projector(M, loss, opt.neutral_tol);
    const NeutralProjector *np = neutral ? &*neutral : nullptr;
    std::vector<std::string> skipped;
    const std::vector<cplx> c =
        integrated_correlation(M, loss, opt.omega_max, opt.omega_points, opt.skip_zero, &skipped, np);
    NoiseEnvelope env = to_envelope(c, opt.theta_points);
    env.omega_max = opt.omega_max;
    env.omega_points = opt.omega_points;
    env.skip_zero = opt.skip_zero;
    env.skipped = std::move(skipped);
    env.neutral_modes_removed = neutral ? neutral->rank : 0;

    if (opt.check_convergence) {
        // doubling omega_max at fixed spacing (2P - 1 points) only adds the tail panel
        const double dw = opt.omega_max / static_cast<double>(opt.omega_points - 1);
        std::vector<std::string> tail_skipped;
        const std::vector<cplx> tail =
            integrate_samples(M, loss, dw, opt.omega_points - 1, 2 * (opt.omega_points - 1), &tail_skipped, np);
        std::vector<cplx> doubled = c;
        for (std::size_t q = 0; q < doubled.size(); ++q)
            doubled[q] += tail[q];
        const NoiseEnvelope wide = to_envelope(doubled, opt.theta_points);
        double change = 0.0;
        double scale = 0.0;
        for (std::size_t t = 0; t < env.values.size(); ++t) {
            change = std::max(change, std::abs(wide.values[t] - env.values[t]));
            scale = std::max(scale, std::abs(wide.values[t]));
        }
        env.convergence_change = scale > 0.0 ? change / scale : 0.0;
        env.converged = env.convergence_change < opt.convergence_tol;
    }
    return env;
}

namespace {
double circular_distance(double a, double b)
{
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}
} // namespace

double background_oscillation_metric(const NoiseEnvelope &env, const std::vector<double> &positions,
                                     double exclusion_halfwidth)
{
    require(env.theta.size() == env.values.size() && !env.values.empty(), "envelope is empty");
    require(exclusion_halfwidth >= 0.0, "exclusion half-width must be non-negative");
    std::vector<double> kept;
    for (std::size_t t = 0; t < env.values.size(); ++t) {
        bool excluded = false;
        for (double p : positions)
            if (circular_distance(env.theta[t], p) <= exclusion_halfwidth) {
                excluded = true;
                break;
            }
        if (!excluded)
            kept.push_back(env.values[t]);
    }
    if (kept.empty())
        throw ValidationError("exclusion windows cover the whole circle");
    double mean = 0.0;
    for (double v : kept)
        mean += v;
    mean /= static_cast<double>(kept.size());
    double acc = 0.0;
    for (double v : kept)
        acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(kept.size());
}

std::vector<double> soliton_positions(const FieldState &state, std::size_t theta_points, std::size_t count)
{
    const std::vector<double> I = intensity_profile(state, theta_points);
    const std::size_t n = I.size();
    std::vector<std::size_t> peaks;
    for (std::size_t t = 0; t < n; ++t) {
        const double prev = I[(t + n - 1) % n], next = I[(t + 1) % n];
        if (I[t] > prev && I[t] >= next)
            peaks.push_back(t);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return I[a] > I[b]; });
    if (peaks.size() > count)
        peaks.resize(count);
    std::vector<double> out;
    for (std::size_t t : peaks)
        out.push_back(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
    return out;
}

} // namespace pdcs
