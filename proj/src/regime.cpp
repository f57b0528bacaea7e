#include "pdcs/regime.hpp"

#include "pdcs/errors.hpp"
#include "pdcs/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pdcs {

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::BelowThreshold: return "BT";
    case Regime::StableSoliton: return "SS";
    case Regime::OscillatorySoliton: return "OS";
    case Regime::TuringPattern: return "TP";
    case Regime::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

Regime regime_from_string(const std::string &s)
{
    for (Regime r : {Regime::BelowThreshold, Regime::StableSoliton, Regime::OscillatorySoliton,
                     Regime::TuringPattern, Regime::Unclassified})
        if (to_string(r) == s)
            return r;
    throw ValidationError("unknown regime label '" + s + "'");
}

PeriodEstimate detect_period(const std::vector<double> &trace)
{
    const std::size_t n = trace.size();
    PeriodEstimate out;
    if (n < 8)
        return out;
    const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = trace[i] - mean;
    const double var = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    if (var <= 0.0)
        return out;

    auto acf = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i)
            acc += x[i] * x[i + lag];
        // unbiased normalization so long lags are not penalized
        return acc / var * static_cast<double>(n) / static_cast<double>(n - lag);
    };

    const std::size_t max_lag = n / 2;
    std::size_t lag = 1;
    while (lag < max_lag && acf(lag) > 0.0)
        ++lag;
    double best = -1.0;
    std::size_t best_lag = 0;
    for (; lag < max_lag; ++lag) {
        const double v = acf(lag);
        if (v > best) {
            best = v;
            best_lag = lag;
        }
    }
    if (best_lag > 0) {
        out.peak = best;
        out.lag = best_lag;
    }
    return out;
}

HarmonicContent dominant_harmonic(const std::vector<double> &profile)
{
    HarmonicContent out;
    const std::size_t n = profile.size();
    if (n < 4)
        return out;
    std::vector<cplx> work(profile.begin(), profile.end());
    Fft(n).forward(work);
    double total = 0.0;
    double best = 0.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        // fold +k and -k together
        double p = std::norm(work[k]);
        if (k != n - k)
            p += std::norm(work[n - k]);
        total += p;
        if (p > best) {
            best = p;
            out.dominant = static_cast<int>(k);
        }
    }
    out.strength = total > 0.0 ? best / total : 0.0;
    return out;
}

RegimeLabel classify_regime(const TrajectoryWindow &w, const ClassifyOptions &opt)
{
    RegimeLabel label;
    auto &diag = label.diagnostics;
    diag.residual = w.residual;
    diag.drift_rate = w.drift_rate;
    diag.norm = w.norms.empty() ? 0.0 : w.norms.back();

    if (!w.norms.empty() && diag.norm < opt.amplitude_floor) {
        label.regime = Regime::BelowThreshold;
        return label;
    }
    if (w.times.size() < 2 || w.peak_intensity.size() != w.times.size()) {
        diag.note = "window has too few samples";
        return label;
    }
    const double span = w.times.back() - w.times.front();
    if (span < opt.min_window) {
        diag.note = "window shorter than the minimum classification span";
        return label;
    }

    const auto [lo, hi] = std::minmax_element(w.peak_intensity.begin(), w.peak_intensity.end());
    const double mean = std::accumulate(w.peak_intensity.begin(), w.peak_intensity.end(), 0.0) /
                        static_cast<double>(w.peak_intensity.size());
    diag.limit_cycle_amplitude = mean > 0.0 ? (*hi - *lo) / mean : 0.0;

    if (!w.final_intensity.empty()) {
        const auto [pmin, pmax] = std::minmax_element(w.final_intensity.begin(), w.final_intensity.end());
        diag.contrast = *pmax > 0.0 ? *pmin / *pmax : 0.0;
        const HarmonicContent h = dominant_harmonic(w.final_intensity);
        diag.harmonic_strength = h.strength;
        diag.dominant_harmonic = h.dominant;
    }

    if (diag.limit_cycle_amplitude > opt.oscillation_threshold) {
        const PeriodEstimate pe = detect_period(w.peak_intensity);
        diag.autocorrelation_peak = pe.peak;
        if (pe.lag > 0 && pe.peak > opt.periodicity_threshold) {
            diag.period = span * static_cast<double>(pe.lag) / static_cast<double>(w.times.size() - 1);
            label.regime = Regime::OscillatorySoliton;
        } else {
            diag.note = "peak intensity varies without a clear period";
        }
        return label;
    }

    if (diag.drift_rate > opt.stationary_rate) {
        diag.note = "profile still drifting";
        return label;
    }
    const bool extended = diag.contrast > opt.localized_contrast;
    if (extended && diag.harmonic_strength > opt.harmonic_dominance)
        label.regime = Regime::TuringPattern;
    else if (!extended)
        label.regime = Regime::StableSoliton;
    else
        diag.note = "stationary but neither localized nor a single-harmonic pattern";
    return label;
}

} // namespace pdcs
