#include "pdcs/squeezing.hpp"

#include "pdcs/errors.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace pdcs {

LossMatrix LossMatrix::from(const NormalizedParams &p)
{
    LossMatrix l;
    l.n = p.mode_count;
    l.gamma_total = p.gamma_total;
    l.gamma_c = p.gamma_c;
    l.gamma_i = p.gamma_i;
    l.validate();
    return l;
}

void LossMatrix::validate() const
{
    require(n > 0, "loss matrix needs at least one mode");
    require(gamma_c > 0.0 && gamma_i >= 0.0, "loss rates must satisfy gamma_c > 0, gamma_i >= 0");
    require(std::abs(gamma_c + gamma_i - gamma_total) <= 1e-12 * gamma_total, "gamma_c + gamma_i must equal gamma_total");
}

Eigen::MatrixXd LossMatrix::matrix() const
{
    return gamma_total * Eigen::MatrixXd::Identity(2 * n, 2 * n);
}

Eigen::MatrixXcd transfer_function(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega, double rcond_min)
{
    loss.validate();
    require(M.rows() == 2 * loss.n && M.cols() == 2 * loss.n, "M does not match the loss matrix");
    require(std::isfinite(omega), "omega must be finite");
    const Eigen::Index m = M.rows();
    Eigen::MatrixXcd A = -M.cast<cplx>();
    A.diagonal().array() += cplx(loss.gamma_total, omega);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double rc = lu.rcond();
    if (!(rc >= rcond_min))
        throw SingularSystemError(omega, rc);
    const double g2 = 2.0 * loss.gamma_total; // sqrt(2G) on both sides of a scalar Gamma
    Eigen::MatrixXcd S = lu.solve(Eigen::MatrixXcd::Identity(m, m)) * g2;
    S.diagonal().array() -= 1.0;
    return S;
}

namespace {

void gauge_block(Eigen::MatrixXcd &U, Eigen::MatrixXcd &V, Eigen::Index b, Eigen::Index k)
{
    const Eigen::MatrixXcd B = U.middleCols(b, k);
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(k, k);
    Eigen::MatrixXcd W(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::MatrixXcd rem = B * T;
        Eigen::Index best = 0;
        rem.rowwise().squaredNorm().maxCoeff(&best);
        Eigen::VectorXcd c = rem.row(best).adjoint();
        c.normalize();
        const Eigen::Index m = T.cols();
        Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(m, m);
        if (m > 1) {
            Q = Eigen::HouseholderQR<Eigen::MatrixXcd>(c).householderQ();
            const cplx ph = c.dot(Q.col(0)); // Q.col(0) = ph * c
            Q.col(0) *= std::conj(ph) / std::abs(ph);
        } else {
            Q(0, 0) = c(0);
        }
        const Eigen::MatrixXcd TQ = T * Q;
        W.col(r) = TQ.col(0);
        T = TQ.rightCols(m - 1);
    }
    U.middleCols(b, k) = B * W;
    V.middleCols(b, k) = V.middleCols(b, k) * W;
}

} // namespace

BlochMessiah bloch_messiah(const Eigen::MatrixXcd &S, double degeneracy_tol)
{
    require(S.rows() == S.cols(), "transfer function must be square");
    require(S.allFinite(), "transfer function has non-finite entries");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("SVD of the transfer function failed");
    BlochMessiah out;
    out.D = svd.singularValues().reverse();
    out.U = svd.matrixU().rowwise().reverse();
    out.V = svd.matrixV().rowwise().reverse();

    const Eigen::Index n = out.D.size();
    for (Eigen::Index b = 0; b < n;) {
        Eigen::Index e = b + 1;
        while (e < n && out.D[e] - out.D[e - 1] <= degeneracy_tol * std::max(1.0, out.D[e - 1]))
            ++e;
        if (e - b > 1)
            gauge_block(out.U, out.V, b, e - b);
        b = e;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index i = 0;
        out.U.col(j).cwiseAbs().maxCoeff(&i);
        const cplx u = out.U(i, j);
        if (std::abs(u) == 0.0)
            continue;
        const cplx ph = std::conj(u) / std::abs(u);
        out.U.col(j) *= ph;
        out.V.col(j) *= ph;
    }
    return out;
}

Eigen::VectorXd apply_intrinsic_loss(const Eigen::VectorXd &D, double gamma_c, double gamma_i)
{
    require(gamma_c > 0.0 && gamma_i >= 0.0, "loss rates must satisfy gamma_c > 0, gamma_i >= 0");
    const double total = gamma_c + gamma_i;
    return (gamma_i / total + (gamma_c / total) * D.array().square()).matrix();
}

double to_db(double variance)
{
    return 10.0 * std::log10(variance);
}

FrequencyDecomposition decompose(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega)
{
    FrequencyDecomposition out;
    out.omega = omega;
    out.S = transfer_function(M, loss, omega);
    out.bm = bloch_messiah(out.S);
    out.D_loss = apply_intrinsic_loss(out.bm.D, loss.gamma_c, loss.gamma_i);
    return out;
}

namespace {

void spectrum_point(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega, std::vector<double> &var,
                    std::vector<double> &db, std::string &err)
{
    try {
        const Eigen::MatrixXcd S = transfer_function(M, loss, omega);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(S);
        if (svd.info() != Eigen::Success)
            throw NumericalError("SVD of the transfer function failed");
        const Eigen::VectorXd D = svd.singularValues().reverse();
        const Eigen::VectorXd v = apply_intrinsic_loss(D, loss.gamma_c, loss.gamma_i);
        var.assign(v.data(), v.data() + v.size());
        db.resize(var.size());
        std::transform(var.begin(), var.end(), db.begin(), to_db);
    } catch (const std::exception &e) {
        err = e.what();
        var.clear();
        db.clear();
    }
}

} // namespace

SqueezingSpectrum squeezing_spectrum(const Eigen::MatrixXd &M, const LossMatrix &loss,
                                     const std::vector<double> &omega_grid)
{
    require(!omega_grid.empty(), "omega grid must be non-empty");
    for (double w : omega_grid)
        require(std::isfinite(w), "omega grid must be finite");
    SqueezingSpectrum out;
    const std::size_t n = omega_grid.size();
    out.omega = omega_grid;
    out.levels_db.resize(n);
    out.variances.resize(n);
    out.errors.resize(n);
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long w = 0; w < count; ++w) {
        const std::size_t i = static_cast<std::size_t>(w);
        spectrum_point(M, loss, omega_grid[i], out.variances[i], out.levels_db[i], out.errors[i]);
    }
    return out;
}

std::vector<double> Supermode::weights() const
{
    std::vector<double> w(static_cast<std::size_t>(X.size()));
    for (Eigen::Index i = 0; i < X.size(); ++i)
        w[static_cast<std::size_t>(i)] = std::norm(X[i]) + std::norm(P[i]);
    return w;
}

int Supermode::dominant_mu() const
{
    const std::vector<double> w = weights();
    const auto it = std::max_element(w.begin(), w.end());
    return mu[static_cast<std::size_t>(it - w.begin())];
}

std::vector<Supermode> extract_supermodes(const FrequencyDecomposition &dec, const ModeGrid &grid, int k)
{
    const Eigen::Index n = grid.size();
    require(dec.bm.U.rows() == 2 * n, "decomposition does not match the grid");
    require(k >= 0 && k <= 2 * n, "k must lie in [0, 2N]");
    std::vector<int> mus(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        mus[static_cast<std::size_t>(i)] = grid.mu(static_cast<std::size_t>(i));

    std::vector<Supermode> out;
    for (int r = 0; r < k; ++r) {
        Supermode sm;
        sm.omega = dec.omega;
        sm.rank = r;
        sm.variance = dec.D_loss[r];
        sm.level_db = to_db(sm.variance);
        sm.X = dec.bm.U.col(r).head(n);
        sm.P = dec.bm.U.col(r).tail(n);
        sm.mu = mus;
        const double tol = 1e-10;
        const bool below = r > 0 && std::abs(dec.D_loss[r] - dec.D_loss[r - 1]) < tol;
        const bool above = r + 1 < dec.D_loss.size() && std::abs(dec.D_loss[r + 1] - dec.D_loss[r]) < tol;
        if (below || above)
            sm.degeneracy_warning = "level is degenerate with a neighbour; supermode fixed by the single-mode gauge";
        out.push_back(std::move(sm));
    }
    return out;
}

std::vector<Supermode> extract_supermodes(const Eigen::MatrixXd &M, const LossMatrix &loss, const ModeGrid &grid,
                                          double omega, int k)
{
    return extract_supermodes(decompose(M, loss, omega), grid, k);
}

PairingReport detect_degenerate_pairs(const std::vector<double> &variances, double tol)
{
    require(tol >= 0.0, "pairing tolerance must be non-negative");
    PairingReport r;
    const int n = static_cast<int>(variances.size());
    for (int i = 0; i < n;) {
        if (i + 1 < n && std::abs(variances[static_cast<std::size_t>(i + 1)] - variances[static_cast<std::size_t>(i)]) <= tol) {
            r.pairs.emplace_back(i, i + 1);
            i += 2;
        } else {
            r.unpaired.push_back(i);
            i += 1;
        }
    }
    return r;
}

std::vector<PairingReport> detect_degenerate_pairs(const SqueezingSpectrum &spectrum, double tol)
{
    std::vector<PairingReport> out;
    out.reserve(spectrum.variances.size());
    for (const auto &v : spectrum.variances)
        out.push_back(detect_degenerate_pairs(v, tol));
    return out;
}

double qdw_localization(const Supermode &sm, const std::vector<double> &crossings, double window)
{
    require(window >= 0.0, "localization window must be non-negative");
    if (crossings.empty())
        return 0.0;
    const std::vector<double> w = sm.weights();
    double total = 0.0, near = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        total += w[i];
        for (double c : crossings)
            if (std::abs(static_cast<double>(sm.mu[i]) - c) <= window) {
                near += w[i];
                break;
            }
    }
    return total > 0.0 ? near / total : 0.0;
}

} // namespace pdcs
