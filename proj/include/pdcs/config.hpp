#pragma once

#include "pdcs/grid_dispersion.hpp"
#include "pdcs/linearization.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pdcs {

struct PointConfig {
    double delta_eff = 12.0;
    double nu = 1.05;       // |nu|
    double nu_phase = 0.0;  // arg(nu), radians
};

struct SweepGridConfig {
    double delta_min = -2.0, delta_max = 14.0;
    int delta_points = 9;
    double nu_min = 0.9, nu_max = 1.6;
    int nu_points = 8;
    std::vector<double> deltas() const;
    std::vector<double> nus() const;
};

struct SteadyConfig {
    /// auto: refined pair, then single soliton, then noise (first soliton wins);
    /// or one of soliton-pair | single-soliton | noise | zero
    std::string seed = "auto";
    double dt = 1.0e-3;
    bool limit_step = true;
    double tol = 1.0e-10;
    double max_time = 600.0;
    double noise_amplitude = 1.0e-6;
    std::uint64_t noise_seed = 2024;
    bool break_symmetry = false;
};

struct SqueezeConfig {
    double omega_min = 0.0;
    double omega_max = 15.0;
    int omega_points = 301;
    int levels = 0;                      // columns level_1..level_k of the spectrum CSV; 0 = all 2N
    int supermodes = 2;                  // k most squeezed per sampled omega
    std::vector<double> supermode_omegas{0.0};
    PumpCoupling coupling = PumpCoupling::Parametric;
    std::string state_file;              // optional per-state spectrum CSV (mu,re,im) to linearize
    double pairing_tol = 1.0e-6;
    double qdw_window = 3.0;
};

struct EnvelopeConfig {
    double omega_max = 20.0;
    int omega_points = 401;
    int theta_points = 512;
    bool remove_neutral_modes = true;
    bool skip_zero = false;
    double convergence_tol = 0.01;
    double exclusion_halfwidth = 0.3;    // radians around each pulse for the background metric
};

struct OracleConfig {
    double nu = 0.95;
    double delta = 0.0;
    double eta = 1.0 / 1.01;
    double omega_max = 15.0;
    int omega_points = 301;
};

struct ScanConfig {
    std::vector<int> modes{0, 20, 40};
    int points = 41;            // per mode, centred on the phase-matched value
    double span_fraction = 0.2; // half-width relative to max(1, |d_int(mu)|)
};

/// Everything a subcommand needs. Defaults are the reference device and loss split.
struct RunConfig {
    PhysicalParams physical;
    double overcoupling_ratio = 1.0 / 1.01;
    bool quartic = true; // false drops d4 (quadratic dispersion)
    PointConfig point;
    SweepGridConfig sweep;
    SteadyConfig steady;
    SqueezeConfig squeeze;
    EnvelopeConfig envelope;
    OracleConfig oracle;
    ScanConfig scan;
    int threads = 0; // 0 = OpenMP default
    std::string out_dir = "out";

    /// Normalized system at the configured point (dispersion toggle applied).
    NormalizedParams normalized() const;
    NormalizedParams normalized(double delta_eff, double nu) const;
    /// Throws ValidationError naming the offending key path.
    void validate() const;
};

/// INI file with sections [physical] [point] [sweep] [steady] [squeeze] [envelope] [oracle]
/// [scan] [run]. Unknown sections or keys are rejected with their "section.key" path.
RunConfig load_config(const std::string &path);
RunConfig parse_config(const std::string &ini_text, const std::string &origin = "<string>");

/// Canonical INI dump (sorted, full precision, [run] omitted); hashed into the manifest and loadable again.
std::string canonical_config(const RunConfig &cfg);

std::vector<double> parse_double_list(const std::string &text, const std::string &key);
std::vector<int> parse_int_list(const std::string &text, const std::string &key);

} // namespace pdcs
