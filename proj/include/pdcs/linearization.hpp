#pragma once

#include "pdcs/field.hpp"
#include "pdcs/grid_dispersion.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace pdcs {

/// Which pump interactions enter F and G.
///  - Parametric: the pump pair only drives F_{j,-j} (= i nu); pump SPM/XPM is already inside
///    delta_eff. This is the linearization of the classical equation.
///  - Full: every quadratic term of the interaction Hamiltonian built from comb + pumps,
///    including pump XPM, single-pump degenerate terms (j + k = +-2p) and pump-comb mixing.
enum class PumpCoupling { Parametric, Full };

std::string to_string(PumpCoupling c);
PumpCoupling pump_coupling_from_string(const std::string &s);

/// Steady comb plus the two stationary pumps.
struct PumpedSpectrum {
    std::vector<cplx> comb; // mean-field amplitudes on the grid; pump slots carry no comb field
    cplx pump_plus{};       // A_{+p}
    cplx pump_minus{};      // A_{-p}
    int pump_mode_index = 0;
    int mode_count = 0;
    /// A_{+p} = -i sqrt(|nu|/2) e^{i arg(nu)/2}, A_{-p} = sqrt(|nu|/2) e^{i arg(nu)/2}
    static constexpr const char *phase_convention = "A+ = -i*sqrt(|nu|/2)*exp(i*arg(nu)/2), A- = sqrt(|nu|/2)*exp(i*arg(nu)/2)";

    /// Comb with the pump amplitudes injected at +-p.
    std::vector<cplx> amplitudes() const;
};

/// Rejects a pump slot whose comb amplitude exceeds overlap_tol * max(1, max |comb|).
PumpedSpectrum assemble_pumped_spectrum(const FieldState &steady, const NormalizedParams &p,
                                        double overlap_tol = 1.0e-6);

/// G Hermitian (a^dagger a block), F symmetric (a^dagger a^dagger block), N x N, generator
/// da/dt = -i (G a + F a^dagger) before loss.
struct InteractionMatrices {
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd F;
};

/// Convolution sums through zero-padded FFTs, matrix fill parallel over rows.
InteractionMatrices build_GF(const PumpedSpectrum &A, const NormalizedParams &p,
                             PumpCoupling coupling = PumpCoupling::Parametric);

/// Real 2N x 2N quadrature generator [[Im(G+F), Re(G-F)], [-Re(G+F), -Im(G+F)^T]],
/// quadratures ordered (X_mu... | P_mu...) over the grid.
Eigen::MatrixXd assemble_M(const InteractionMatrices &gf);

/// Symplectic form [[0, I], [-I, 0]] of size 2n.
Eigen::MatrixXd symplectic_form(Eigen::Index n);

/// Central-difference Jacobian of the mean-field right-hand side in (Re | Im) coordinates.
Eigen::MatrixXd numerical_jacobian(const FieldState &state, const NormalizedParams &p, double h = 1.0e-6);

struct JacobianCheck {
    double deviation = 0.0; // max |(M - Gamma) - J| / max |J| over compared entries
    double scale = 0.0;
    Eigen::Index compared_modes = 0;
};

/// Compares M - gamma_total * I against the numerical Jacobian at a fixed point, skipping the
/// pump-mode rows and columns. Throws ValidationError when the state is not stationary.
JacobianCheck jacobian_check(const Eigen::MatrixXd &M, const FieldState &steady, const NormalizedParams &p,
                             double h = 1.0e-6, double fixed_point_tol = 1.0e-6);

} // namespace pdcs
