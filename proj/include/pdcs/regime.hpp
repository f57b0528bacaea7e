#pragma once

#include <string>
#include <vector>

namespace pdcs {

enum class Regime { BelowThreshold, StableSoliton, OscillatorySoliton, TuringPattern, Unclassified };

std::string to_string(Regime r);
Regime regime_from_string(const std::string &s);

struct RegimeDiagnostics {
    double residual = 0.0;              // ||rhs|| / ||E|| of the final state
    double drift_rate = 0.0;            // split-step ||dE/dt|| / ||E|| at window end
    double norm = 0.0;                  // final ||E||
    double limit_cycle_amplitude = 0.0; // (max - min) / mean of the peak-intensity trace
    double period = 0.0;                // detected oscillation period (0 if none)
    double autocorrelation_peak = 0.0;
    double harmonic_strength = 0.0;     // dominant non-DC intensity harmonic / non-DC power
    int dominant_harmonic = 0;
    double contrast = 0.0;              // min / max of the intensity profile
    double growth_rate = 0.0;           // leading Jacobian eigenvalue of an accepted fixed point
    std::string note;
};

struct RegimeLabel {
    Regime regime = Regime::Unclassified;
    RegimeDiagnostics diagnostics;
};

/// Samples of one evolution window after the transient.
struct TrajectoryWindow {
    std::vector<double> times;
    std::vector<double> peak_intensity; // max_theta |E|^2 per sample
    std::vector<double> norms;
    std::vector<double> final_intensity; // |E(theta)|^2 of the last sample
    double drift_rate = 0.0;
    double residual = 0.0;
};

struct ClassifyOptions {
    double amplitude_floor = 1.0e-7;      // ||E|| below this is vacuum
    double oscillation_threshold = 0.01;  // relative peak-intensity oscillation
    double stationary_rate = 1.0e-6;      // drift rate that counts as stationary
    double min_window = 20.0;             // normalized time units
    double harmonic_dominance = 0.5;
    double localized_contrast = 0.01;     // min/max below this means a localized pulse exists
    double periodicity_threshold = 0.5;   // autocorrelation peak needed for a limit cycle
};

RegimeLabel classify_regime(const TrajectoryWindow &window, const ClassifyOptions &opt = {});

/// Normalized autocorrelation peak after the first zero crossing and its lag (in samples).
struct PeriodEstimate {
    double peak = 0.0;
    std::size_t lag = 0;
};
PeriodEstimate detect_period(const std::vector<double> &trace);

/// Fraction of non-DC power carried by the strongest harmonic of a real periodic profile.
struct HarmonicContent {
    int dominant = 0;
    double strength = 0.0;
};
HarmonicContent dominant_harmonic(const std::vector<double> &profile);

} // namespace pdcs
