#pragma once

#include "pdcs/grid_dispersion.hpp"
#include "pdcs/linearization.hpp"
#include "pdcs/squeezing.hpp"

#include <vector>

namespace pdcs {

/// Below-threshold pair (mu, -mu) with no classical comb: two decoupled degenerate OPAs of
/// detuning delta and drive |nu|, unit decay, output mixed with vacuum at efficiency eta.
struct PairSystem {
    int mu = 0;
    double delta = 0.0;
    double nu_mag = 0.0;
    double eta = 1.0 / 1.01;

    void validate() const;
};

struct VariancePair {
    double min = 1.0;
    double max = 1.0;
};

/// Extreme output quadrature variances at analysis frequency omega (closed form).
VariancePair opa_output_spectrum(const PairSystem &ps, double omega);

PairSystem pair_system(const NormalizedParams &p, int mu);

/// Every output variance of the below-threshold system at omega, ascending: both extremes of
/// mu = 0 once, of each (mu, -mu) pair twice, and vacuum for the unpaired edge mode.
std::vector<double> below_threshold_levels(const NormalizedParams &p, double omega);

/// delta_eff cancelling the pair detuning: -(d_int(mu) + d_int(-mu)) / 2, i.e. -d_int(mu) for
/// an even profile.
double phase_matched_detuning(int mu, const NormalizedParams &p);

struct DetuningScanResult {
    double best_delta = 0.0;
    double best_variance = 1.0;
    std::vector<double> deltas;
    std::vector<double> variances; // mode-mu squeezing per scanned delta
    Supermode winner;              // supermode at best_delta
};

/// Full numerical pipeline (comb = 0, pumps only) across the delta grid; mode-mu squeezing is
/// the smallest omega = 0 variance among supermodes with more than half their weight on +-mu.
DetuningScanResult detuning_scan(int mu, const NormalizedParams &p, const std::vector<double> &deltas,
                                 PumpCoupling coupling = PumpCoupling::Parametric);

/// M for the below-threshold configuration (zero comb plus pumps).
Eigen::MatrixXd below_threshold_M(const NormalizedParams &p, PumpCoupling coupling = PumpCoupling::Parametric);

} // namespace pdcs
