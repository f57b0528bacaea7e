#pragma once

#include "pdcs/field.hpp"
#include "pdcs/grid_dispersion.hpp"
#include "pdcs/regime.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace pdcs {

/// Right-hand side of the normalized parametrically driven NLSE in mode space:
///   dE/dt = [-1 + i(|E|^2 - delta_eff) - i d_int(mu)] E + nu E*.
/// The Kerr product is evaluated on a 2N-point theta grid so the cubic term is the
/// exact truncated mode-space convolution (no wraparound). The conjugate drive couples
/// mu to -mu; the edge mode -N/2 has no partner on the grid and sees no drive.
class PdnlseModel {
public:
    explicit PdnlseModel(const NormalizedParams &p);

    const NormalizedParams &params() const noexcept { return p_; }
    const ModeGrid &grid() const noexcept { return grid_; }

    std::vector<cplx> rhs(std::span<const cplx> modes) const;
    /// (|E|^2 E) projected on the grid
    std::vector<cplx> kerr(std::span<const cplx> modes) const;

    /// Real Jacobian of rhs in (Re E | Im E) coordinates, 2N x 2N.
    Eigen::MatrixXd jacobian(std::span<const cplx> modes) const;

    /// Linear substep exact over `dt`: loss, detuning, dispersion and the nu-coupling
    /// of each (mu, -mu) pair as a closed-form 2x2 exponential.
    void linear_step(std::span<cplx> modes, double dt) const;
    /// Kerr substep exact pointwise: E(theta) *= exp(i |E(theta)|^2 dt).
    void kerr_step(std::span<cplx> modes, double dt) const;

private:
    struct PairPropagator {
        std::size_t a, b; // a == b for mu = 0
        cplx m00, m01, m10, m11;
        bool single;      // edge mode with no partner
    };
    void rebuild_propagators(double dt) const;

    NormalizedParams p_;
    ModeGrid grid_;
    Fft padded_;
    mutable double cached_dt_ = -1.0;
    mutable std::vector<PairPropagator> props_;
};

std::vector<cplx> pdnlse_rhs_modes(std::span<const cplx> modes, const NormalizedParams &p);
FieldState pdnlse_rhs(const FieldState &state, const NormalizedParams &p);

struct EvolveOptions {
    /// Abort when ||E|| exceeds this bound.
    double blowup_norm = 1.0e3;
};

/// Strang-split integration L(dt/2) K(dt) L(dt/2); deterministic given state and dt.
FieldState evolve(const FieldState &state, const NormalizedParams &p, double dt, long steps,
                  const EvolveOptions &opt = {});

/// Largest step for which no mode's linear phase per step exceeds safety * pi; larger steps
/// excite spurious split-step resonances at high |mu|.
double split_step_stable_dt(const NormalizedParams &p, double safety = 0.8);

/// Two sech pulses at theta = 0 and pi with opposite signs (E(theta + pi) = -E(theta)),
/// using the damped-driven soliton amplitude sqrt(2 delta') and phase locked to nu.
FieldState init_antisymmetric_soliton_pair(const NormalizedParams &p);

/// One sech pulse at theta = 0 with the same amplitude, width and phase as the pair ansatz.
FieldState init_single_soliton(const NormalizedParams &p);

/// Newton refinement of an ansatz toward the nearby stationary state; returns the ansatz
/// unchanged when the refinement does not converge or collapses toward vacuum.
FieldState refined_seed(const FieldState &seed, const NormalizedParams &p, double tol = 1.0e-10);

/// Antisymmetric pair ansatz refined by Newton iteration to the nearby stationary pair
/// (the refinement preserves the pair symmetry). Falls back to the raw ansatz when the
/// refinement does not converge or collapses toward vacuum.
FieldState refined_soliton_pair(const NormalizedParams &p, double tol = 1.0e-10);

/// Complex Gaussian noise of the given per-mode RMS amplitude (reproducible from seed).
FieldState init_noise(const NormalizedParams &p, double amplitude, std::uint64_t seed);

struct NewtonResult {
    FieldState state;
    double residual = 0.0; // ||rhs|| / ||E||
    int iterations = 0;
    bool converged = false;
};

/// Newton refinement of a near-stationary state on the continuous right-hand side.
/// The translation zero mode is handled by the minimum-norm (pseudo-inverse) step.
NewtonResult newton_polish(const FieldState &state, const NormalizedParams &p, double tol,
                           int max_iterations = 20);

struct SteadyStateOptions {
    double dt = 1.0e-3;
    bool limit_step = true;      // cap dt at split_step_stable_dt
    double tol = 1.0e-10;        // ||rhs|| / ||E|| for a stationary state
    double max_time = 600.0;
    double sample_interval = 0.05;
    double chunk_time = 25.0;    // trajectory window length per decision
    double transient_time = 20.0;
    double stationary_rate = 1.0e-7; // split-step drift rate that hands over to Newton
    /// Stationary states are accepted within the symmetry subspace of the seed (evolve preserves
    /// E(theta + pi) = -E(theta)). With break_symmetry, a fixed point whose Jacobian has a growing
    /// mode is perturbed and integration continues.
    bool break_symmetry = false;
    double growth_tolerance = 1.0e-6;
    double kick_amplitude = 1.0e-6;    // relative to ||E||
    std::uint64_t kick_seed = 7;
    int max_kicks = 3;
    ClassifyOptions classify;
    EvolveOptions evolve;
};

/// True when the even-mu content is below rel_tol of the norm, i.e. E(theta + pi) = -E(theta).
bool is_antisymmetric_pair(const FieldState &state, double rel_tol = 1.0e-9);

/// Largest real parts of the Jacobian spectrum (the translation mode contributes ~0): over all
/// perturbations, and over those preserving the pair antisymmetry (equal to `full` otherwise).
struct GrowthRates {
    double full = 0.0;
    double subspace = 0.0;
    bool antisymmetric = false;
};
GrowthRates leading_growth_rates(const FieldState &state, const NormalizedParams &p);

struct SteadyStateResult {
    FieldState state;
    RegimeLabel label;
    double residual = 0.0;
    double elapsed_time = 0.0;
};

/// Integrates to a stationary state (Newton polished), a sustained oscillation, or a
/// decayed vacuum; max_time exhaustion returns Unclassified with the last state.
SteadyStateResult find_steady_state(const FieldState &seed, const NormalizedParams &p,
                                    const SteadyStateOptions &opt = {});

struct SweepPoint {
    double delta_eff = 0.0;
    double nu = 0.0;
    RegimeLabel label;
    double residual = 0.0;
    FieldState state;
    std::string error;   // non-empty when the point failed
    std::string seed;    // "soliton-pair", "single-soliton" or "noise": which seed decided the label
};

struct SweepOptions {
    SteadyStateOptions steady;
    double noise_amplitude = 1.0e-6;
    bool single_soliton_seed = true; // try one pulse when the pair yields no soliton
    std::uint64_t noise_seed = 2024;
};

/// (delta_eff, nu) grid. Seeds per point: Newton-refined soliton pair, then a single soliton,
/// then noise; the first soliton seed yielding SS or OS decides the label.
/// Points run concurrently; `on_point` is called in grid order as results become final.
std::vector<SweepPoint> phase_diagram_sweep(const std::vector<double> &deltas, const std::vector<double> &nus,
                                            const NormalizedParams &base, const SweepOptions &opt = {},
                                            const std::function<void(const SweepPoint &)> &on_point = {});

} // namespace pdcs
