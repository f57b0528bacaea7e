#include "pdcs/mean_field.hpp"

#include "pdcs/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

namespace pdcs {

namespace {
constexpr cplx I{0.0, 1.0};

double l2(std::span<const cplx> v)
{
    double acc = 0.0;
    for (const auto &x : v)
        acc += std::norm(x);
    return std::sqrt(acc);
}
} // namespace

PdnlseModel::PdnlseModel(const NormalizedParams &p) : p_(p), grid_(p.mode_count), padded_(2 * static_cast<std::size_t>(p.mode_count))
{
    p_.validate();
}

std::vector<cplx> PdnlseModel::kerr(std::span<const cplx> modes) const
{
    require(modes.size() == static_cast<std::size_t>(grid_.size()), "state does not match the mode grid");
    std::vector<cplx> theta = modes_to_theta(modes, grid_, padded_);
    for (auto &e : theta)
        e *= std::norm(e);
    return theta_to_modes(theta, grid_, padded_);
}

std::vector<cplx> PdnlseModel::rhs(std::span<const cplx> modes) const
{
    std::vector<cplx> out = kerr(modes);
    const std::size_t n = modes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double detuning = p_.delta_eff + p_.d_int[i];
        cplx v = I * out[i] + (-1.0 - I * detuning) * modes[i];
        if (const auto j = grid_.partner(i))
            v += p_.nu * std::conj(modes[*j]);
        out[i] = v;
    }
    return out;
}

Eigen::MatrixXd PdnlseModel::jacobian(std::span<const cplx> modes) const
{
    const int n = grid_.size();
    require(modes.size() == static_cast<std::size_t>(n), "state does not match the mode grid");
    const int mu0 = grid_.mu_min();

    // C_q = sum_{m - n = q} E_m E_n^*,  P_s = sum_{m + n = s} E_m E_n
    std::vector<cplx> corr(2 * n - 1, cplx{}), prod(2 * n - 1, cplx{});
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            corr[a - b + n - 1] += modes[a] * std::conj(modes[b]);
            prod[a + b] += modes[a] * modes[b];
        }

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            cplx alpha = 2.0 * I * corr[j - k + n - 1];
            if (j == k)
                alpha += -1.0 - I * (p_.delta_eff + p_.d_int[j]);
            // P index: mu_j + mu_k = (j + mu0) + (k + mu0); prod is indexed from 2 mu0
            cplx beta = I * prod[j + k];
            if (grid_.mu(j) + grid_.mu(k) == 0 && grid_.contains(-grid_.mu(j)))
                beta += p_.nu;
            J(j, k) = (alpha + beta).real();
            J(j, n + k) = (beta - alpha).imag();
            J(n + j, k) = (alpha + beta).imag();
            J(n + j, n + k) = (alpha - beta).real();
        }
    }
    (void)mu0;
    return J;
}

void PdnlseModel::rebuild_propagators(double dt) const
{
    props_.clear();
    const std::size_t n = static_cast<std::size_t>(grid_.size());
    for (std::size_t a = 0; a < n; ++a) {
        const auto partner = grid_.partner(a);
        const double da = p_.delta_eff + p_.d_int[a];
        if (!partner) {
            const cplx f = std::exp((-1.0 - I * da) * dt);
            props_.push_back({a, a, f, 0.0, 0.0, f, true});
            continue;
        }
        const std::size_t b = *partner;
        if (b < a)
            continue; // handled with the other member of the pair
        const double db = p_.delta_eff + p_.d_int[b];
        const double s = 0.5 * (da + db);
        const double kappa2 = std::norm(p_.nu) - s * s;
        double c, sh;
        if (kappa2 >= 0.0) {
            const double k = std::sqrt(kappa2);
            c = std::cosh(k * dt);
            sh = k > 0.0 ? std::sinh(k * dt) / k : dt;
        } else {
            const double w = std::sqrt(-kappa2);
            c = std::cos(w * dt);
            sh = std::sin(w * dt) / w;
        }
        const cplx pre = std::exp(-dt) * std::exp(0.5 * I * (db - da) * dt);
        props_.push_back({a, b, pre * (c - I * s * sh), pre * p_.nu * sh, pre * std::conj(p_.nu) * sh,
                          pre * (c + I * s * sh), false});
    }
    cached_dt_ = dt;
}

void PdnlseModel::linear_step(std::span<cplx> modes, double dt) const
{
    if (dt != cached_dt_)
        rebuild_propagators(dt);
    for (const auto &pp : props_) {
        if (pp.single) {
            modes[pp.a] *= pp.m00;
            continue;
        }
        const cplx ea = modes[pp.a];
        const cplx eb_conj = std::conj(modes[pp.b]);
        const cplx na = pp.m00 * ea + pp.m01 * eb_conj;
        const cplx nb_conj = pp.m10 * ea + pp.m11 * eb_conj;
        modes[pp.a] = na;
        if (pp.b != pp.a)
            modes[pp.b] = std::conj(nb_conj);
    }
}

void PdnlseModel::kerr_step(std::span<cplx> modes, double dt) const
{
    std::vector<cplx> theta = modes_to_theta(modes, grid_, padded_);
    for (auto &e : theta)
        e *= std::polar(1.0, std::norm(e) * dt);
    const std::vector<cplx> back = theta_to_modes(theta, grid_, padded_);
    std::copy(back.begin(), back.end(), modes.begin());
}

std::vector<cplx> pdnlse_rhs_modes(std::span<const cplx> modes, const NormalizedParams &p)
{
    return PdnlseModel(p).rhs(modes);
}

FieldState pdnlse_rhs(const FieldState &state, const NormalizedParams &p)
{
    const FieldState s = state.to_spectral();
    require(s.mode_count() == p.mode_count, "state grid does not match parameters");
    return FieldState::spectral(pdnlse_rhs_modes(s.values(), p), s.time());
}

double split_step_stable_dt(const NormalizedParams &p, double safety)
{
    // the splitting resonates when a linear phase per step reaches pi
    double worst = 0.0;
    const ModeGrid g = p.grid();
    for (int i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(p.delta_eff + p.dispersion(g.mu(static_cast<std::size_t>(i)))));
    return worst > 0.0 ? safety * std::numbers::pi / worst : std::numeric_limits<double>::infinity();
}

namespace {

void strang_step(const PdnlseModel &model, std::span<cplx> modes, double dt)
{
    model.linear_step(modes, 0.5 * dt);
    model.kerr_step(modes, dt);
    model.linear_step(modes, 0.5 * dt);
}

void check_blowup(std::span<const cplx> modes, double t, const EvolveOptions &opt)
{
    const double nrm = l2(modes);
    if (!std::isfinite(nrm) || nrm > opt.blowup_norm) {
        std::ostringstream os;
        os << "field blow-up at t = " << t << ": ||E|| = " << nrm << " exceeds bound " << opt.blowup_norm;
        throw NumericalError(os.str());
    }
}

} // namespace

FieldState evolve(const FieldState &state, const NormalizedParams &p, double dt, long steps,
                  const EvolveOptions &opt)
{
    require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    require(steps >= 0, "steps must be non-negative");
    FieldState s = state.to_spectral();
    require(s.mode_count() == p.mode_count, "state grid does not match parameters");
    const PdnlseModel model(p);
    auto &v = s.values();
    for (long k = 0; k < steps; ++k) {
        strang_step(model, v, dt);
        if ((k & 255) == 255)
            check_blowup(v, s.time() + (k + 1) * dt, opt);
    }
    s.set_time(s.time() + steps * dt);
    check_blowup(v, s.time(), opt);
    return s;
}

namespace {

struct SechAnsatz {
    double amp, inv_width;
    cplx rot;
};

SechAnsatz sech_ansatz(const NormalizedParams &p)
{
    // curvature of d_int at mu = 0 from the symmetric second difference
    double d2 = p.dispersion(1) + p.dispersion(-1) - 2.0 * p.dispersion(0);
    if (!(d2 > 0.0))
        d2 = 1.0;

    const double nu_mag = std::abs(p.nu);
    const double nu_arg = std::arg(p.nu);
    double shift = 0.0, lock = 0.0;
    if (nu_mag > 1.0) {
        // stationary phase: Re(nu e^{-2i phi}) = 1, Im(nu e^{-2i phi}) = -sqrt(|nu|^2 - 1)
        shift = std::sqrt(nu_mag * nu_mag - 1.0);
        lock = std::atan2(shift, 1.0);
    }
    double delta_prime = p.delta_eff + shift;
    if (!(delta_prime > 0.0))
        delta_prime = 0.5;
    return {std::sqrt(2.0 * delta_prime), std::sqrt(2.0 * delta_prime / d2), std::polar(1.0, 0.5 * (nu_arg + lock))};
}

double sech_at(const SechAnsatz &a, double x)
{
    // distance on the circle to the pulse centre at 0
    const double d = std::remainder(x, 2.0 * std::numbers::pi);
    return a.amp / std::cosh(a.inv_width * d);
}

} // namespace

FieldState init_antisymmetric_soliton_pair(const NormalizedParams &p)
{
    const ModeGrid grid = p.grid();
    const SechAnsatz a = sech_ansatz(p);
    const std::size_t m = 4 * static_cast<std::size_t>(grid.size());
    std::vector<cplx> theta(m);
    for (std::size_t k = 0; k < m / 2; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        theta[k] = a.rot * (sech_at(a, th) - sech_at(a, th - std::numbers::pi));
        theta[k + m / 2] = -theta[k];
    }
    const Fft fft(m);
    return FieldState::spectral(theta_to_modes(theta, grid, fft));
}

FieldState init_single_soliton(const NormalizedParams &p)
{
    const ModeGrid grid = p.grid();
    const SechAnsatz a = sech_ansatz(p);
    const std::size_t m = 4 * static_cast<std::size_t>(grid.size());
    std::vector<cplx> theta(m);
    for (std::size_t k = 0; k < m; ++k)
        theta[k] = a.rot * sech_at(a, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
    const Fft fft(m);
    return FieldState::spectral(theta_to_modes(theta, grid, fft));
}

FieldState refined_seed(const FieldState &seed, const NormalizedParams &p, double tol)
{
    const double n0 = seed.norm();
    if (!(n0 > 0.0))
        return seed;
    NewtonResult nr = newton_polish(seed, p, tol, 40);
    if (nr.converged && nr.state.finite() && nr.state.norm() > 0.25 * n0)
        return std::move(nr.state);
    return seed.to_spectral();
}

FieldState refined_soliton_pair(const NormalizedParams &p, double tol)
{
    return refined_seed(init_antisymmetric_soliton_pair(p), p, tol);
}

FieldState init_noise(const NormalizedParams &p, double amplitude, std::uint64_t seed)
{
    require(amplitude >= 0.0, "noise amplitude must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> modes(static_cast<std::size_t>(p.mode_count));
    for (auto &m : modes) {
        const double re = g(rng);
        const double im = g(rng);
        m = amplitude * cplx(re, im) / std::numbers::sqrt2;
    }
    return FieldState::spectral(std::move(modes));
}

NewtonResult newton_polish(const FieldState &state, const NormalizedParams &p, double tol, int max_iterations)
{
    require(tol > 0.0, "tol must be positive");
    const PdnlseModel model(p);
    FieldState s = state.to_spectral();
    auto &v = s.values();
    const std::size_t n = v.size();

    NewtonResult out;
    auto residual_of = [&](std::span<const cplx> x, std::vector<cplx> &r) {
        r = model.rhs(x);
        const double nx = l2(x);
        return nx > 0.0 ? l2(r) / nx : l2(r);
    };
    std::vector<cplx> r;
    double res = residual_of(v, r);
    for (int it = 0; it < max_iterations && res >= tol; ++it) {
        const Eigen::MatrixXd J = model.jacobian(v);
        Eigen::VectorXd rhs(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = -r[i].real();
            rhs[n + i] = -r[i].imag();
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-10);
        const Eigen::VectorXd step = svd.solve(rhs);

        // damped update: accept the first step length that lowers the residual
        double lambda = 1.0;
        std::vector<cplx> trial(n), rt;
        double res_trial = res;
        for (int half = 0; half < 12; ++half, lambda *= 0.5) {
            for (std::size_t i = 0; i < n; ++i)
                trial[i] = v[i] + lambda * cplx(step[i], step[n + i]);
            res_trial = residual_of(trial, rt);
            if (res_trial < res)
                break;
        }
        ++out.iterations;
        if (!(res_trial < res))
            break;
        v = trial;
        r = rt;
        res = res_trial;
    }
    out.residual = res;
    out.converged = res < tol;
    out.state = std::move(s);
    return out;
}

namespace {

double peak_intensity(const PdnlseModel &model, std::span<const cplx> modes, const Fft &fft)
{
    const std::vector<cplx> theta = modes_to_theta(modes, model.grid(), fft);
    double best = 0.0;
    for (const auto &e : theta)
        best = std::max(best, std::norm(e));
    return best;
}

} // namespace

bool is_antisymmetric_pair(const FieldState &state, double rel_tol)
{
    const FieldState s = state.to_spectral();
    const ModeGrid g = s.grid();
    double even = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.values().size(); ++i) {
        const double w = std::norm(s.values()[i]);
        total += w;
        if (g.mu(i) % 2 == 0)
            even += w;
    }
    return total > 0.0 && even <= rel_tol * rel_tol * total;
}

namespace {
double max_real_eigenvalue(const Eigen::MatrixXd &J)
{
    Eigen::EigenSolver<Eigen::MatrixXd> es(J, false);
    if (es.info() != Eigen::Success)
        throw NumericalError("Jacobian eigenvalue computation failed");
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        best = std::max(best, es.eigenvalues()[i].real());
    return best;
}
} // namespace

GrowthRates leading_growth_rates(const FieldState &state, const NormalizedParams &p)
{
    const PdnlseModel model(p);
    const FieldState s = state.to_spectral();
    const Eigen::MatrixXd J = model.jacobian(s.values());
    GrowthRates out;
    out.full = max_real_eigenvalue(J);
    out.antisymmetric = is_antisymmetric_pair(s);
    if (!out.antisymmetric) {
        out.subspace = out.full;
        return out;
    }
    // odd-mu perturbations keep E(theta + pi) = -E(theta); they form an invariant block
    const ModeGrid g = s.grid();
    const Eigen::Index n = g.size();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i)
        if (g.mu(static_cast<std::size_t>(i)) % 2 != 0)
            keep.push_back(i);
    const Eigen::Index k = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd sub(2 * k, 2 * k);
    for (Eigen::Index r = 0; r < 2 * k; ++r) {
        const Eigen::Index rr = r < k ? keep[r] : n + keep[r - k];
        for (Eigen::Index c = 0; c < 2 * k; ++c) {
            const Eigen::Index cc = c < k ? keep[c] : n + keep[c - k];
            sub(r, c) = J(rr, cc);
        }
    }
    out.subspace = max_real_eigenvalue(sub);
    return out;
}

SteadyStateResult find_steady_state(const FieldState &seed, const NormalizedParams &p, const SteadyStateOptions &opt)
{
    require(opt.tol > 0.0, "steady-state tol must be positive");
    require(opt.dt > 0.0 && opt.max_time > 0.0, "dt and max_time must be positive");
    require(opt.chunk_time >= opt.classify.min_window, "chunk_time must cover the classification window");

    const PdnlseModel model(p);
    const Fft theta_fft(2 * static_cast<std::size_t>(p.mode_count));
    FieldState s = seed.to_spectral();
    require(s.mode_count() == p.mode_count, "seed grid does not match parameters");
    auto &v = s.values();

    const double dt = opt.limit_step ? std::min(opt.dt, split_step_stable_dt(p)) : opt.dt;
    const long steps_per_sample = std::max(1L, std::lround(opt.sample_interval / dt));
    const double sample_dt = steps_per_sample * dt;
    const long samples_per_chunk = std::max(2L, std::lround(opt.chunk_time / sample_dt));

    SteadyStateResult out;
    double t = 0.0;
    double prev_oscillation = -1.0;
    int kicks = 0;
    std::vector<cplx> prev(v.size());

    while (t < opt.max_time) {
        TrajectoryWindow w;
        for (long k = 0; k < samples_per_chunk; ++k) {
            prev = v;
            for (long j = 0; j < steps_per_sample; ++j)
                strang_step(model, v, dt);
            t += sample_dt;
            check_blowup(v, t, opt.evolve);
            w.times.push_back(t);
            w.peak_intensity.push_back(peak_intensity(model, v, theta_fft));
            w.norms.push_back(l2(v));
        }
        const double nrm = w.norms.back();
        double diff = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            diff += std::norm(v[i] - prev[i]);
        w.drift_rate = nrm > 0.0 ? std::sqrt(diff) / (sample_dt * nrm) : 0.0;
        {
            const std::vector<cplx> r = model.rhs(v);
            w.residual = nrm > 0.0 ? l2(r) / nrm : 0.0;
        }
        s.set_time(t);

        if (nrm < opt.classify.amplitude_floor) {
            out.label = classify_regime(w, opt.classify);
            out.label.diagnostics.note = "decayed to vacuum; state set to the exact zero fixed point";
            out.residual = 0.0;
            out.state = FieldState::zeros(p.mode_count);
            out.state.set_time(t);
            out.elapsed_time = t;
            return out;
        }
        if (t < opt.transient_time)
            continue;
        // still decaying toward vacuum: keep integrating
        if (w.norms.front() > 0.0 && nrm < 0.9 * w.norms.front() && nrm < 1e-2)
            continue;

        w.final_intensity = intensity_profile(s, 2 * static_cast<std::size_t>(p.mode_count));
        RegimeLabel lab = classify_regime(w, opt.classify);

        if (lab.regime == Regime::OscillatorySoliton) {
            // a decaying transient oscillation must not be reported as a limit cycle
            const double amp = lab.diagnostics.limit_cycle_amplitude;
            const bool sustained = prev_oscillation > 0.0 && amp > 0.8 * prev_oscillation;
            prev_oscillation = amp;
            if (sustained) {
                out.label = lab;
                out.residual = w.residual;
                out.state = s;
                out.elapsed_time = t;
                return out;
            }
            continue;
        }
        prev_oscillation = -1.0;

        if (w.drift_rate < opt.stationary_rate) {
            NewtonResult nr = newton_polish(s, p, opt.tol);
            if (nr.converged) {
                w.residual = nr.residual;
                w.final_intensity = intensity_profile(nr.state, 2 * static_cast<std::size_t>(p.mode_count));
                RegimeLabel final_label = classify_regime(w, opt.classify);
                if (final_label.regime == Regime::StableSoliton || final_label.regime == Regime::TuringPattern) {
                    const GrowthRates growth = leading_growth_rates(nr.state, p);
                    const bool subspace_unstable = growth.subspace > opt.growth_tolerance;
                    const bool unstable = growth.full > opt.growth_tolerance;
                    if (subspace_unstable || (unstable && opt.break_symmetry)) {
                        if (kicks >= opt.max_kicks)
                            continue;
                        // saddle reached (e.g. from a Newton-refined seed): perturb and keep
                        // integrating, inside the seed's symmetry class unless breaking is requested
                        ++kicks;
                        FieldState kick = init_noise(p, opt.kick_amplitude * nrm, opt.kick_seed + kicks);
                        if (growth.antisymmetric && !opt.break_symmetry) {
                            const ModeGrid g = kick.grid();
                            for (std::size_t i = 0; i < v.size(); ++i)
                                if (g.mu(i) % 2 == 0)
                                    kick.values()[i] = 0.0;
                        }
                        for (std::size_t i = 0; i < v.size(); ++i)
                            v[i] += kick.values()[i];
                        prev_oscillation = -1.0;
                        continue;
                    }
                    final_label.diagnostics.growth_rate = growth.full;
                    if (unstable)
                        final_label.diagnostics.note = "linearly unstable to perturbations breaking the pair symmetry";
                    out.label = final_label;
                    out.residual = nr.residual;
                    out.state = std::move(nr.state);
                    out.state.set_time(t);
                    out.elapsed_time = t;
                    return out;
                }
            }
        }
    }

    out.label.regime = Regime::Unclassified;
    out.label.diagnostics.note = "max_time exhausted without a stationary state or limit cycle";
    out.state = s;
    out.residual = l2(model.rhs(v)) / std::max(l2(v), 1e-300);
    out.label.diagnostics.residual = out.residual;
    out.label.diagnostics.norm = l2(v);
    out.elapsed_time = t;
    return out;
}

std::vector<SweepPoint> phase_diagram_sweep(const std::vector<double> &deltas, const std::vector<double> &nus,
                                            const NormalizedParams &base, const SweepOptions &opt,
                                            const std::function<void(const SweepPoint &)> &on_point)
{
    require(!deltas.empty() && !nus.empty(), "sweep grids must be non-empty");
    require(std::is_sorted(deltas.begin(), deltas.end()) && std::is_sorted(nus.begin(), nus.end()),
            "sweep grids must be monotone");
    const std::size_t total = deltas.size() * nus.size();
    std::vector<SweepPoint> results(total);
    std::vector<char> done(total, 0);
    std::size_t next_emit = 0;
    std::mutex emit_mutex;

    const long long n_total = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic)
    for (long long idx = 0; idx < n_total; ++idx) {
        const std::size_t id = static_cast<std::size_t>(idx);
        SweepPoint pt;
        pt.delta_eff = deltas[id / nus.size()];
        pt.nu = nus[id % nus.size()];
        try {
            NormalizedParams p = base;
            p.delta_eff = pt.delta_eff;
            p.nu = pt.nu;
            auto is_soliton = [](Regime r) { return r == Regime::StableSoliton || r == Regime::OscillatorySoliton; };
            // phase-locked solitons need |nu| > 1; below that only the noise seed is meaningful
            const bool above = std::abs(p.nu) > 1.0;
            SteadyStateResult sol;
            sol.label.regime = Regime::Unclassified;
            if (above) {
                sol = find_steady_state(refined_soliton_pair(p), p, opt.steady);
                pt.seed = "soliton-pair";
            }
            if (above && !is_soliton(sol.label.regime) && opt.single_soliton_seed) {
                SteadyStateResult single =
                    find_steady_state(refined_seed(init_single_soliton(p), p), p, opt.steady);
                if (is_soliton(single.label.regime) || sol.label.regime == Regime::Unclassified) {
                    sol = std::move(single);
                    pt.seed = "single-soliton";
                }
            }
            if (!is_soliton(sol.label.regime)) {
                SteadyStateResult noise =
                    find_steady_state(init_noise(p, opt.noise_amplitude, opt.noise_seed + id), p, opt.steady);
                // an unclassified soliton run defers to whatever the noise seed settles into
                if (sol.label.regime == Regime::Unclassified || noise.label.regime != Regime::Unclassified) {
                    sol = std::move(noise);
                    pt.seed = "noise";
                }
            }
            pt.label = sol.label;
            pt.residual = sol.residual;
            pt.state = std::move(sol.state);
        } catch (const std::exception &e) {
            pt.error = e.what();
            pt.label.regime = Regime::Unclassified;
            pt.label.diagnostics.note = e.what();
        }

        std::lock_guard lock(emit_mutex);
        results[id] = std::move(pt);
        done[id] = 1;
        while (next_emit < total && done[next_emit]) {
            if (on_point)
                on_point(results[next_emit]);
            ++next_emit;
        }
    }
    return results;
}

} // namespace pdcs
