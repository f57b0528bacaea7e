#pragma once

#include "pdcs/grid_dispersion.hpp"
#include "pdcs/linearization.hpp"
#include "pdcs/mean_field.hpp"
#include "pdcs/squeezing.hpp"

#include <Eigen/Dense>

#include <random>

namespace fixtures {

using namespace pdcs;

inline NormalizedParams device(double delta, double nu, bool quartic = true)
{
    PhysicalParams pp;
    if (!quartic)
        pp.d4_hz = 0.0;
    return normalize(pp, delta, nu);
}

/// Small grid with the device coefficients, for tests that need many dense solves.
inline NormalizedParams small_device(double delta, double nu, int modes = 40, int pump = 15)
{
    PhysicalParams pp;
    pp.mode_count = modes;
    pp.pump_mode_index = pump;
    return normalize(pp, delta, nu);
}

/// Newton-refined stationary soliton pair at (12, 1.05).
inline const FieldState &ss_state()
{
    static const FieldState s = refined_soliton_pair(device(12.0, 1.05));
    return s;
}

inline const Eigen::MatrixXd &ss_M()
{
    static const Eigen::MatrixXd M = [] {
        const NormalizedParams p = device(12.0, 1.05);
        return assemble_M(build_GF(assemble_pumped_spectrum(ss_state(), p), p));
    }();
    return M;
}

inline Eigen::MatrixXd bt_M(const NormalizedParams &p)
{
    return assemble_M(build_GF(assemble_pumped_spectrum(FieldState::zeros(p.mode_count), p), p));
}

inline double max_abs(const Eigen::MatrixXcd &m) { return m.cwiseAbs().maxCoeff(); }

} // namespace fixtures
