#pragma once

#include "pdcs/field.hpp"
#include "pdcs/squeezing.hpp"

#include <Eigen/Dense>

#include <vector>

namespace pdcs {

/// Intracavity response in the (a | a^dagger) basis:
/// Q(w) = [i w + Gamma - O^dagger M O]^{-1} sqrt(2 Gamma), O = (1/sqrt2)[[I, I], [-iI, iI]].
struct AnnihilationTransfer {
    double omega = 0.0;
    Eigen::MatrixXcd Q;
    Eigen::Index n = 0;
    auto Q1() const { return Q.topLeftCorner(n, n); }
    auto Q2() const { return Q.topRightCorner(n, n); }
    auto Q3() const { return Q.bottomLeftCorner(n, n); }
    auto Q4() const { return Q.bottomRightCorner(n, n); }
};

/// Quadrature-to-ladder change of basis O.
Eigen::MatrixXcd ladder_basis(Eigen::Index n);

AnnihilationTransfer annihilation_transfer(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega,
                                           double rcond_min = 1.0e-14);

/// Spectral projector (ladder basis) onto the neutral modes of M - Gamma, i.e. directions with
/// zero decay such as the soliton translation mode. Empty (0 x 0) when there are none.
/// Throws NumericalError when the neutral eigenvalue is defective (no projector exists).
struct NeutralProjector {
    Eigen::MatrixXcd P;
    int rank = 0;
    double smallest_singular_value = 0.0;
};
NeutralProjector neutral_projector(const Eigen::MatrixXd &M, const LossMatrix &loss, double rel_tol = 1.0e-9);

/// Q restricted to the complement of the neutral modes: [i w + Gamma - K + P]^{-1} (I - P) sqrt(2 Gamma),
/// which equals the full Q minus its pole P sqrt(2 Gamma) / (i w) and is finite at w = 0.
AnnihilationTransfer annihilation_transfer(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega,
                                           const NeutralProjector &neutral, double rcond_min = 1.0e-14);

struct EnvelopeOptions {
    std::size_t theta_points = 512;
    double omega_max = 20.0;
    std::size_t omega_points = 401; // samples on [0, omega_max], mirrored to negative omega
    /// Omit omega = 0 from the quadrature (a neutral translation mode makes the integrand
    /// diverge there); with skip_zero the first panel is integrated from omega_1 upward.
    bool skip_zero = false;
    /// Subtract the neutral-mode pole (timing-jitter diffusion of a soliton), whose 1/w^2
    /// contribution makes the integral diverge; with false the raw Q2 form is integrated.
    bool remove_neutral_modes = true;
    double neutral_tol = 1.0e-9; // singular values of M - Gamma below this relative level count as neutral
    bool check_convergence = true;
    double convergence_tol = 0.01;
};

struct NoiseEnvelope {
    std::vector<double> theta;
    std::vector<double> values;
    double max_imaginary = 0.0;     // largest |Im| residue before taking the real part
    double omega_max = 0.0;
    std::size_t omega_points = 0;
    bool skip_zero = false;
    bool converged = true;          // doubling omega_max and omega_points moved no value by > tol
    double convergence_change = 0.0;
    std::vector<std::string> skipped; // frequencies dropped as singular
    int neutral_modes_removed = 0;
};

/// <a^dagger(theta) a(theta)> = int dw <Theta(theta), Q2 Q2^dagger>(w) with
/// Theta_lm = exp(-i (l - m) theta); negative frequencies through Q2(-w) = conj(Q3(w)).
NoiseEnvelope photon_envelope(const Eigen::MatrixXd &M, const LossMatrix &loss, const ModeGrid &grid,
                              const EnvelopeOptions &opt = {});

/// Diagonal sums c_q = sum_{l - m = q} N_lm of the omega-integrated N = Q2 Q2^dagger, indexed
/// q + n - 1; the envelope is sum_q c_q exp(i q theta).
std::vector<cplx> integrated_correlation(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega_max,
                                         std::size_t omega_points, bool skip_zero,
                                         std::vector<std::string> *skipped = nullptr,
                                         const NeutralProjector *neutral = nullptr);

/// Evaluates sum_q c_q exp(i q theta) on a uniform theta grid of the given size.
std::vector<cplx> envelope_from_correlation(const std::vector<cplx> &c, std::size_t theta_points);

/// Mean-square deviation about the mean of the envelope samples outside +-halfwidth of every
/// soliton position (non-DC power of the background).
double background_oscillation_metric(const NoiseEnvelope &env, const std::vector<double> &soliton_positions,
                                     double exclusion_halfwidth);

/// Angles of the intensity maxima of the classical state (one per distinct pulse), strongest first.
std::vector<double> soliton_positions(const FieldState &state, std::size_t theta_points, std::size_t count);

} // namespace pdcs
