#pragma once

#include "pdcs/grid_dispersion.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace pdcs {

/// Uniform cavity decay, identical on every mode and on the X and P halves.
struct LossMatrix {
    Eigen::Index n = 0; // modes (the matrix is 2n x 2n)
    double gamma_total = 1.0;
    double gamma_c = 1.0 / 1.01;
    double gamma_i = 0.01 / 1.01;

    static LossMatrix from(const NormalizedParams &p);
    void validate() const;
    Eigen::MatrixXd matrix() const;
    double coupling_efficiency() const { return gamma_c / gamma_total; }
    /// Variance floor gamma_i / gamma_total reached by perfect squeezing.
    double floor() const { return gamma_i / gamma_total; }
};

/// S(w) = sqrt(2 Gamma) (i w + Gamma - M)^{-1} sqrt(2 Gamma) - I via an LU solve.
/// Throws SingularSystemError when the reciprocal condition estimate falls below rcond_min.
Eigen::MatrixXcd transfer_function(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega,
                                   double rcond_min = 1.0e-14);

struct BlochMessiah {
    Eigen::MatrixXcd U, V;
    Eigen::VectorXd D; // ascending amplitude gains
};

/// SVD S = U diag(D) V^dagger with D ascending. Within blocks of equal D (relative gap below
/// degeneracy_tol) the columns are rotated toward single-quadrature basis vectors, then each
/// column's largest entry is made real positive; V follows so the factorization is unchanged.
BlochMessiah bloch_messiah(const Eigen::MatrixXcd &S, double degeneracy_tol = 1.0e-11);

/// gamma_i / Gamma + (gamma_c / Gamma) D^2 elementwise (variances).
Eigen::VectorXd apply_intrinsic_loss(const Eigen::VectorXd &D, double gamma_c, double gamma_i);

double to_db(double variance);

/// One analysis frequency: everything needed for spectra and supermodes.
struct FrequencyDecomposition {
    double omega = 0.0;
    Eigen::MatrixXcd S;
    BlochMessiah bm;
    Eigen::VectorXd D_loss; // ascending variances
};

FrequencyDecomposition decompose(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega);

struct SqueezingSpectrum {
    std::vector<double> omega;
    /// levels[w] ascending in dB; empty when that frequency failed
    std::vector<std::vector<double>> levels_db;
    std::vector<std::vector<double>> variances;
    std::vector<std::string> errors; // per-frequency, empty on success
    bool ok(std::size_t w) const { return errors[w].empty(); }
};

/// Independent decomposition at each frequency, run concurrently, merged by index.
SqueezingSpectrum squeezing_spectrum(const Eigen::MatrixXd &M, const LossMatrix &loss,
                                     const std::vector<double> &omega_grid);

struct Supermode {
    double omega = 0.0;
    int rank = 0;            // 0 = most squeezed
    double variance = 0.0;   // after loss
    double level_db = 0.0;
    Eigen::VectorXcd X, P;   // coefficients over the mu grid, (X | P) halves of a unit vector
    std::vector<int> mu;     // grid labels for the entries of X and P
    std::optional<std::string> degeneracy_warning;

    /// |X_mu|^2 + |P_mu|^2
    std::vector<double> weights() const;
    int dominant_mu() const;
};

/// The k most squeezed output supermodes (columns of U) at one frequency.
std::vector<Supermode> extract_supermodes(const FrequencyDecomposition &dec, const ModeGrid &grid, int k);
std::vector<Supermode> extract_supermodes(const Eigen::MatrixXd &M, const LossMatrix &loss, const ModeGrid &grid,
                                          double omega, int k);

struct PairingReport {
    std::vector<std::pair<int, int>> pairs; // level indices (ascending order)
    std::vector<int> unpaired;
};

/// Greedy adjacent pairing of ascending levels whose variances agree within tol.
PairingReport detect_degenerate_pairs(const std::vector<double> &variances, double tol);
std::vector<PairingReport> detect_degenerate_pairs(const SqueezingSpectrum &spectrum, double tol);

/// Fraction of the supermode weight within +-window modes of any crossing.
double qdw_localization(const Supermode &sm, const std::vector<double> &crossings, double window = 3.0);

} // namespace pdcs
