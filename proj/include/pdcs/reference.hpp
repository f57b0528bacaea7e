#pragma once

#include "pdcs/linearization.hpp"
#include "pdcs/squeezing.hpp"
#include "pdcs/temporal_noise.hpp"

#include <vector>

/// Straightforward single-threaded versions of the parallel kernels, used as test oracles
/// and as the baseline in the benchmarks.
namespace pdcs::reference {

/// G and F from explicit O(N^3) mode sums instead of padded FFT convolutions.
InteractionMatrices build_GF_direct(const PumpedSpectrum &A, const NormalizedParams &p,
                                    PumpCoupling coupling = PumpCoupling::Parametric);

/// Sequential frequency loop; S from a full-pivot inverse and a Jacobi SVD.
SqueezingSpectrum squeezing_spectrum_serial(const Eigen::MatrixXd &M, const LossMatrix &loss,
                                            const std::vector<double> &omega_grid);

/// Sequential trapezoid over omega with explicit double loops for the diagonal sums.
std::vector<cplx> integrated_correlation_serial(const Eigen::MatrixXd &M, const LossMatrix &loss, double omega_max,
                                                std::size_t omega_points, bool skip_zero,
                                                const NeutralProjector *neutral = nullptr);

} // namespace pdcs::reference
