#include "pdcs/run.hpp"

#include "pdcs/analytic_oracle.hpp"
#include "pdcs/errors.hpp"
#include "pdcs/linearization.hpp"
#include "pdcs/squeezing.hpp"
#include "pdcs/temporal_noise.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace pdcs {

const std::vector<std::string> &subcommands()
{
    static const std::vector<std::string> s{"steady",   "sweep",  "squeeze",         "supermodes",
                                            "envelope", "oracle", "reproduce-figure"};
    return s;
}

const std::vector<std::pair<std::string, std::string>> &figure_presets()
{
    static const std::vector<std::pair<std::string, std::string>> f{
        {"2b", "SS squeezing spectrum and classical comb at (delta_eff, nu) = (12, 1.05)"},
        {"2c", "BT squeezing spectrum at (0, 0.95), top supermode at omega = 0, closed-form overlay"},
        {"3", "two most squeezed SS supermodes vs omega at (12, 1.05) with QDW localization"},
        {"4", "temporal noise envelopes at (12, 1.05), quartic and quadratic dispersion"},
        {"S1", "four most squeezed BT supermodes vs omega at (0, 0.95)"},
        {"S2", "phase-matching detuning scans for mu = 0, 20, 40 below threshold (nu = 0.95)"},
        {"S3", "steady states and spectra at (1.2, 1.05) [SS] and (12, 1.50) [OS]"},
        {"S4", "SS spectrum and supermodes at (12, 1.05) with quadratic dispersion"},
    };
    return f;
}

namespace {

/// Writes into a bundle under a sub-directory prefix.
struct Sink {
    ResultBundle &bundle;
    std::string prefix;

    std::string name(const std::string &file) const { return prefix.empty() ? file : prefix + "/" + file; }
    void csv(const std::string &file, const CsvTable &t, const std::string &role) { bundle.write_csv(name(file), t, role); }
    void json(const std::string &file, const Json &j, const std::string &role) { bundle.write_json(name(file), j, role); }
    void text(const std::string &file, const std::string &s, const std::string &role) { bundle.write_text(name(file), s, role); }
    void log(const std::string &line) { bundle.log((prefix.empty() ? "" : "[" + prefix + "] ") + line); }
    Json &summary()
    {
        if (prefix.empty())
            return bundle.summary();
        return bundle.summary()[prefix];
    }
};

std::string fmt(double x) { return format_double(x); }

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

SteadyStateOptions steady_options(const RunConfig &cfg)
{
    SteadyStateOptions o;
    o.dt = cfg.steady.dt;
    o.limit_step = cfg.steady.limit_step;
    o.tol = cfg.steady.tol;
    o.max_time = cfg.steady.max_time;
    o.break_symmetry = cfg.steady.break_symmetry;
    return o;
}

SweepOptions sweep_options(const RunConfig &cfg)
{
    SweepOptions o;
    o.steady = steady_options(cfg);
    o.noise_amplitude = cfg.steady.noise_amplitude;
    o.noise_seed = cfg.steady.noise_seed;
    return o;
}

Json diagnostics_json(const RegimeLabel &l)
{
    const RegimeDiagnostics &d = l.diagnostics;
    Json j = Json::object();
    j["label"] = to_string(l.regime);
    j["residual"] = d.residual;
    j["drift_rate"] = d.drift_rate;
    j["norm"] = d.norm;
    j["limit_cycle_amplitude"] = d.limit_cycle_amplitude;
    j["period"] = d.period;
    j["autocorrelation_peak"] = d.autocorrelation_peak;
    j["harmonic_strength"] = d.harmonic_strength;
    j["dominant_harmonic"] = d.dominant_harmonic;
    j["contrast"] = d.contrast;
    j["growth_rate"] = d.growth_rate;
    j["note"] = d.note;
    return j;
}

struct Linearized {
    FieldState state;        // state the linearization is taken about (zeros for BT)
    RegimeLabel label;
    NormalizedParams p;
    InteractionMatrices gf;
    Eigen::MatrixXd M;
    LossMatrix loss;
};

Linearized linearize(const RunConfig &cfg, const NormalizedParams &p, Sink &out, bool dump_matrices)
{
    Linearized lin;
    lin.p = p;
    if (!cfg.squeeze.state_file.empty()) {
        lin.state = read_state_csv(cfg.squeeze.state_file, p.mode_count);
        const double res = [&] {
            const auto r = pdnlse_rhs_modes(lin.state.values(), p);
            double a = 0.0, b = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                a += std::norm(r[i]);
                b += std::norm(lin.state.values()[i]);
            }
            return b > 0.0 ? std::sqrt(a / b) : std::sqrt(a);
        }();
        lin.label.regime = lin.state.norm() < 1e-7 ? Regime::BelowThreshold : Regime::StableSoliton;
        lin.label.diagnostics.residual = res;
        if (res > 1e-6)
            throw ValidationError("squeeze.state_file: state is not stationary (residual " + fmt(res) + ")");
        out.log("linearizing about state file " + cfg.squeeze.state_file);
    } else {
        ClassicalState cs = solve_classical(cfg, p);
        lin.label = cs.label;
        out.log("classical state: " + to_string(cs.label.regime) + " from seed " + cs.seed + ", residual " +
                fmt(cs.residual));
        if (cs.label.regime == Regime::BelowThreshold)
            lin.state = FieldState::zeros(p.mode_count);
        else if (cs.label.regime == Regime::StableSoliton)
            lin.state = std::move(cs.state);
        else
            throw NumericalError("no stationary state to linearize at (delta_eff, nu) = (" + fmt(p.delta_eff) + ", " +
                                 fmt(std::abs(p.nu)) + "): regime " + to_string(cs.label.regime));
    }
    const PumpedSpectrum A = assemble_pumped_spectrum(lin.state, p);
    lin.gf = build_GF(A, p, cfg.squeeze.coupling);
    lin.M = assemble_M(lin.gf);
    lin.loss = LossMatrix::from(p);
    out.csv("state_spectrum.csv", state_csv(lin.state), "classical state (mu,re,im)");
    if (dump_matrices) {
        out.csv("F.csv", triplet_csv(lin.gf.F), "parametric block F (row,col,re,im)");
        out.csv("G.csv", triplet_csv(lin.gf.G), "beam-splitter block G (row,col,re,im)");
        out.text("M.csv", dense_matrix_csv(lin.M), "mode interaction matrix M (dense)");
    }
    out.summary()["regime"] = to_string(lin.label.regime);
    out.summary()["pump_coupling"] = to_string(cfg.squeeze.coupling);
    out.summary()["dispersion"] = cfg.quartic ? "quartic" : "quadratic";
    return lin;
}

CsvTable supermode_table(const Supermode &sm)
{
    CsvTable t;
    t.header = {"mu", "reX", "imX", "reP", "imP"};
    for (std::size_t i = 0; i < sm.mu.size(); ++i)
        t.add_row({std::to_string(sm.mu[i]), fmt(sm.X[static_cast<Eigen::Index>(i)].real()),
                   fmt(sm.X[static_cast<Eigen::Index>(i)].imag()), fmt(sm.P[static_cast<Eigen::Index>(i)].real()),
                   fmt(sm.P[static_cast<Eigen::Index>(i)].imag())});
    return t;
}

CsvTable supermode_polar_table(const Supermode &sm)
{
    CsvTable t;
    t.header = {"mu", "absX", "argX", "absP", "argP"};
    for (std::size_t i = 0; i < sm.mu.size(); ++i) {
        const cplx x = sm.X[static_cast<Eigen::Index>(i)], q = sm.P[static_cast<Eigen::Index>(i)];
        t.add_row({std::to_string(sm.mu[i]), fmt(std::abs(x)), fmt(std::arg(x)), fmt(std::abs(q)), fmt(std::arg(q))});
    }
    return t;
}

std::vector<double> qdw_centres(const RunConfig &cfg)
{
    // QDW centres are the genuine crossings of the quartic device profile, also for d4-zero runs
    RunConfig q = cfg;
    q.quartic = true;
    const NormalizedParams p = q.normalized();
    return zero_crossings(p.d_int, p.grid().mu_min()).sign_changes();
}

void cmd_steady(const RunConfig &cfg, Sink out)
{
    const NormalizedParams p = cfg.normalized();
    const ClassicalState cs = solve_classical(cfg, p);
    CsvTable t;
    t.header = {"delta_eff", "nu", "label", "residual"};
    t.add_row({fmt(cfg.point.delta_eff), fmt(cfg.point.nu), to_string(cs.label.regime), fmt(cs.residual)});
    out.csv("steady.csv", t, "steady-state label");
    out.csv("state_spectrum.csv", state_csv(cs.state), "final state (mu,re,im)");
    Json d = diagnostics_json(cs.label);
    d["seed"] = cs.seed;
    d["time"] = cs.state.time();
    out.json("steady.json", d, "regime diagnostics");
    out.summary()["label"] = to_string(cs.label.regime);
    out.summary()["residual"] = cs.residual;
    out.summary()["seed"] = cs.seed;
}

void cmd_sweep(const RunConfig &cfg, Sink out)
{
    const std::vector<double> deltas = cfg.sweep.deltas(), nus = cfg.sweep.nus();
    const NormalizedParams base = cfg.normalized();
    CsvTable t;
    t.header = {"delta_eff", "nu", "label", "residual"};
    const std::filesystem::path live = out.bundle.dir() / out.name("sweep.csv");
    std::filesystem::create_directories(live.parent_path());
    std::ofstream stream(live, std::ios::binary | std::ios::trunc);
    stream << to_csv(CsvTable{t.header, {}}) << std::flush;
    std::vector<SweepPoint> pts = phase_diagram_sweep(deltas, nus, base, sweep_options(cfg), [&](const SweepPoint &pt) {
        std::vector<std::string> row{fmt(pt.delta_eff), fmt(pt.nu), to_string(pt.label.regime),
                                     pt.error.empty() ? fmt(pt.residual) : "nan"};
        const std::string csv = to_csv(CsvTable{t.header, {row}});
        stream << csv.substr(csv.find('\n') + 1) << std::flush; // rows persist as points finish
        t.rows.push_back(std::move(row));
    });
    stream.close();
    out.csv("sweep.csv", t, "phase-diagram labels (streamed)");
    Json points = Json::array();
    Json labels = Json::object();
    int failures = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::size_t di = i / nus.size(), ni = i % nus.size();
        Json j = Json::object();
        j["delta_eff"] = pts[i].delta_eff;
        j["nu"] = pts[i].nu;
        j["label"] = to_string(pts[i].label.regime);
        j["seed"] = pts[i].seed;
        if (pts[i].state.mode_count() > 0) {
            const std::string file = "states/state_d" + std::to_string(di) + "_n" + std::to_string(ni) + ".csv";
            out.csv(file, state_csv(pts[i].state), "final state (mu,re,im)");
            j["state_file"] = file;
        }
        if (!pts[i].error.empty()) {
            j["error"] = pts[i].error;
            ++failures;
        }
        j["diagnostics"] = diagnostics_json(pts[i].label);
        points.push_back(std::move(j));
        labels[to_string(pts[i].label.regime)] = labels.value(to_string(pts[i].label.regime), 0) + 1;
    }
    out.json("sweep.json", points, "per-point seeds, diagnostics and state files");
    out.summary()["points"] = pts.size();
    out.summary()["failures"] = failures;
    out.summary()["label_counts"] = labels;
}

SqueezingSpectrum spectrum_for(const Linearized &lin, const RunConfig &cfg, Sink &out)
{
    const std::vector<double> om = linspace(cfg.squeeze.omega_min, cfg.squeeze.omega_max, cfg.squeeze.omega_points);
    SqueezingSpectrum sp = squeezing_spectrum(lin.M, lin.loss, om);
    const int two_n = static_cast<int>(lin.M.rows());
    const int k = cfg.squeeze.levels > 0 ? cfg.squeeze.levels : two_n;
    CsvTable t;
    t.header.push_back("omega");
    for (int i = 1; i <= k; ++i)
        t.header.push_back("level_" + std::to_string(i));
    CsvTable errs;
    errs.header = {"omega", "error"};
    CsvTable pairing;
    pairing.header = {"omega", "pairs", "unpaired", "unpaired_levels_db"};
    const std::vector<PairingReport> reports = detect_degenerate_pairs(sp, cfg.squeeze.pairing_tol);
    for (std::size_t w = 0; w < om.size(); ++w) {
        std::vector<std::string> row{fmt(om[w])};
        if (sp.ok(w)) {
            for (int i = 0; i < k; ++i)
                row.push_back(fmt(sp.levels_db[w][static_cast<std::size_t>(i)]));
            std::string un;
            for (int u : reports[w].unpaired)
                un += (un.empty() ? "" : ";") + fmt(sp.levels_db[w][static_cast<std::size_t>(u)]);
            pairing.add_row({fmt(om[w]), std::to_string(reports[w].pairs.size()),
                             std::to_string(reports[w].unpaired.size()), un});
        } else {
            row.resize(static_cast<std::size_t>(k) + 1, "nan");
            std::string e = sp.errors[w];
            std::replace(e.begin(), e.end(), ',', ';');
            errs.add_row({fmt(om[w]), e});
            out.log("omega " + fmt(om[w]) + ": " + sp.errors[w]);
        }
        t.add_row(std::move(row));
    }
    out.csv("spectrum.csv", t, "squeezing levels in dB, ascending per omega");
    out.csv("pairing.csv", pairing, "degenerate-pair report per omega");
    if (!errs.rows.empty())
        out.csv("spectrum_errors.csv", errs, "frequencies without a transfer function");
    double best = std::numeric_limits<double>::infinity(), best_w = 0.0;
    for (std::size_t w = 0; w < om.size(); ++w)
        if (sp.ok(w) && sp.levels_db[w][0] < best) {
            best = sp.levels_db[w][0];
            best_w = om[w];
        }
    out.summary()["best_level_db"] = std::isfinite(best) ? Json(best) : Json(nullptr);
    out.summary()["best_omega"] = best_w;
    out.summary()["failed_frequencies"] = errs.rows.size();
    return sp;
}

void write_supermodes_at(const Linearized &lin, const RunConfig &cfg, Sink &out)
{
    const ModeGrid g = lin.p.grid();
    const std::vector<double> centres = qdw_centres(cfg);
    Json dumps = Json::array();
    for (double w : cfg.squeeze.supermode_omegas) {
        Json d = Json::object();
        d["omega"] = w;
        try {
            const FrequencyDecomposition dec = decompose(lin.M, lin.loss, w);
            const std::vector<Supermode> sms = extract_supermodes(dec, g, cfg.squeeze.supermodes);
            Json modes = Json::array();
            for (const Supermode &sm : sms) {
                const std::string stem = "supermodes/omega_" + fmt(w) + "_rank_" + std::to_string(sm.rank + 1);
                out.csv(stem + ".csv", supermode_table(sm), "supermode coefficients");
                out.csv(stem + "_polar.csv", supermode_polar_table(sm), "supermode |X|, arg X, |P|, arg P");
                Json m = Json::object();
                m["rank"] = sm.rank + 1;
                m["level_db"] = sm.level_db;
                m["dominant_mu"] = sm.dominant_mu();
                m["qdw_localization"] = qdw_localization(sm, centres, cfg.squeeze.qdw_window);
                if (sm.degeneracy_warning)
                    m["degeneracy_warning"] = *sm.degeneracy_warning;
                modes.push_back(std::move(m));
            }
            d["supermodes"] = std::move(modes);
            d["D"] = std::vector<double>(dec.bm.D.data(), dec.bm.D.data() + dec.bm.D.size());
            d["D_loss"] = std::vector<double>(dec.D_loss.data(), dec.D_loss.data() + dec.D_loss.size());
        } catch (const SingularSystemError &e) {
            d["error"] = e.what();
            out.log("supermodes at omega " + fmt(w) + ": " + e.what());
        }
        dumps.push_back(std::move(d));
    }
    out.json("decomposition.json", dumps, "Bloch-Messiah gains and supermode summaries");
}

void cmd_squeeze(const RunConfig &cfg, Sink out)
{
    const Linearized lin = linearize(cfg, cfg.normalized(), out, true);
    spectrum_for(lin, cfg, out);
    write_supermodes_at(lin, cfg, out);
}

void supermode_track(const Linearized &lin, const RunConfig &cfg, Sink &out, int k)
{
    const std::vector<double> om = linspace(cfg.squeeze.omega_min, cfg.squeeze.omega_max, cfg.squeeze.omega_points);
    const ModeGrid g = lin.p.grid();
    const std::vector<double> centres = qdw_centres(cfg);
    std::vector<std::vector<Supermode>> per(om.size());
    std::vector<std::string> errs(om.size());
    const long long n = static_cast<long long>(om.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        const std::size_t w = static_cast<std::size_t>(i);
        try {
            per[w] = extract_supermodes(lin.M, lin.loss, g, om[w], k);
        } catch (const SingularSystemError &e) {
            errs[w] = e.what();
        }
    }
    CsvTable summary;
    summary.header = {"omega", "rank", "level_db", "dominant_mu", "qdw_localization", "degenerate"};
    std::vector<CsvTable> ranks(static_cast<std::size_t>(k));
    for (auto &r : ranks)
        r.header = {"omega", "mu", "reX", "imX", "reP", "imP"};
    double best_loc = 0.0, best_loc_w = 0.0;
    int best_loc_rank = 0;
    for (std::size_t w = 0; w < om.size(); ++w) {
        if (!errs[w].empty()) {
            out.log("omega " + fmt(om[w]) + ": " + errs[w]);
            continue;
        }
        for (const Supermode &sm : per[w]) {
            const double loc = qdw_localization(sm, centres, cfg.squeeze.qdw_window);
            if (loc > best_loc) {
                best_loc = loc;
                best_loc_w = om[w];
                best_loc_rank = sm.rank + 1;
            }
            summary.add_row({fmt(om[w]), std::to_string(sm.rank + 1), fmt(sm.level_db), std::to_string(sm.dominant_mu()),
                             fmt(loc), sm.degeneracy_warning ? "1" : "0"});
            CsvTable &r = ranks[static_cast<std::size_t>(sm.rank)];
            for (std::size_t j = 0; j < sm.mu.size(); ++j) {
                const auto e = static_cast<Eigen::Index>(j);
                r.add_row({fmt(om[w]), std::to_string(sm.mu[j]), fmt(sm.X[e].real()), fmt(sm.X[e].imag()),
                           fmt(sm.P[e].real()), fmt(sm.P[e].imag())});
            }
        }
    }
    out.csv("supermode_summary.csv", summary, "per-omega ranked supermodes with QDW localization");
    for (int r = 0; r < k; ++r)
        out.csv("supermodes_rank_" + std::to_string(r + 1) + ".csv", ranks[static_cast<std::size_t>(r)],
                "supermode coefficients vs omega (long format)");
    Json c = Json::array();
    for (double x : centres)
        c.push_back(x);
    out.summary()["qdw_centres"] = c;
    out.summary()["max_qdw_localization"] = best_loc;
    out.summary()["max_qdw_localization_omega"] = best_loc_w;
    out.summary()["max_qdw_localization_rank"] = best_loc_rank;
}

void cmd_supermodes(const RunConfig &cfg, Sink out)
{
    const Linearized lin = linearize(cfg, cfg.normalized(), out, false);
    supermode_track(lin, cfg, out, cfg.squeeze.supermodes);
}

struct EnvelopeResult {
    NoiseEnvelope env;
    std::vector<double> positions;
    double metric = 0.0;
};

EnvelopeResult envelope_for(const RunConfig &cfg, Sink out)
{
    const Linearized lin = linearize(cfg, cfg.normalized(), out, false);
    EnvelopeOptions o;
    o.theta_points = static_cast<std::size_t>(cfg.envelope.theta_points);
    o.omega_max = cfg.envelope.omega_max;
    o.omega_points = static_cast<std::size_t>(cfg.envelope.omega_points);
    o.skip_zero = cfg.envelope.skip_zero;
    o.remove_neutral_modes = cfg.envelope.remove_neutral_modes;
    o.convergence_tol = cfg.envelope.convergence_tol;
    EnvelopeResult r;
    r.env = photon_envelope(lin.M, lin.loss, lin.p.grid(), o);
    const std::vector<double> I = intensity_profile(lin.state, o.theta_points);
    const double imax = *std::max_element(I.begin(), I.end());
    if (lin.state.norm() > 0.0)
        r.positions = soliton_positions(lin.state, o.theta_points, 2);
    r.metric = background_oscillation_metric(r.env, r.positions, cfg.envelope.exclusion_halfwidth);
    CsvTable t;
    t.header = {"theta", "noise", "classical_intensity_normalized"};
    for (std::size_t i = 0; i < r.env.values.size(); ++i)
        t.add_numeric_row({r.env.theta[i], r.env.values[i], imax > 0.0 ? I[i] / imax : 0.0});
    out.csv("envelope.csv", t, "intracavity photon-number envelope");
    Json &s = out.summary();
    s["converged"] = r.env.converged;
    s["convergence_change"] = r.env.convergence_change;
    s["max_imaginary"] = r.env.max_imaginary;
    s["neutral_modes_removed"] = r.env.neutral_modes_removed;
    s["omega_max"] = r.env.omega_max;
    s["omega_points"] = r.env.omega_points;
    s["skipped_frequencies"] = r.env.skipped.size();
    s["soliton_positions"] = r.positions;
    s["background_oscillation_metric"] = r.metric;
    if (!r.env.converged)
        out.log("warning: envelope changed by " + fmt(r.env.convergence_change) + " on doubling omega_max");
    for (const auto &e : r.env.skipped)
        out.log("skipped: " + e);
    return r;
}

void cmd_envelope(const RunConfig &cfg, Sink out) { envelope_for(cfg, out); }

void cmd_oracle(const RunConfig &cfg, Sink out)
{
    PairSystem ps;
    ps.mu = 0;
    ps.delta = cfg.oracle.delta;
    ps.nu_mag = cfg.oracle.nu;
    ps.eta = cfg.oracle.eta;
    CsvTable t;
    t.header = {"omega", "min_dB", "max_dB"};
    for (double w : linspace(0.0, cfg.oracle.omega_max, cfg.oracle.omega_points)) {
        const VariancePair v = opa_output_spectrum(ps, w);
        t.add_numeric_row({w, to_db(v.min), to_db(v.max)});
    }
    out.csv("oracle.csv", t, "closed-form OPA output spectrum");
    out.summary()["min_db_at_zero"] = to_db(opa_output_spectrum(ps, 0.0).min);
}

void cmd_scan(const RunConfig &cfg, Sink out)
{
    const NormalizedParams p = cfg.normalized();
    Json results = Json::array();
    for (int mu : cfg.scan.modes) {
        const double target = phase_matched_detuning(mu, p);
        const double half = cfg.scan.span_fraction * std::max(1.0, std::abs(target));
        const std::vector<double> deltas = linspace(target - half, target + half, cfg.scan.points);
        const DetuningScanResult r = detuning_scan(mu, p, deltas, cfg.squeeze.coupling);
        CsvTable t;
        t.header = {"delta_eff", "variance", "level_db"};
        for (std::size_t i = 0; i < deltas.size(); ++i)
            t.add_numeric_row({deltas[i], r.variances[i], to_db(r.variances[i])});
        out.csv("scan_mu_" + std::to_string(mu) + ".csv", t, "mode-mu squeezing vs delta_eff at omega = 0");
        out.csv("scan_mu_" + std::to_string(mu) + "_supermode.csv", supermode_table(r.winner), "winning supermode");
        Json j = Json::object();
        j["mu"] = mu;
        j["phase_matched_delta"] = target;
        j["best_delta"] = r.best_delta;
        j["grid_step"] = deltas.size() > 1 ? deltas[1] - deltas[0] : 0.0;
        j["best_level_db"] = to_db(r.best_variance);
        results.push_back(std::move(j));
    }
    out.summary()["scans"] = results;
}

RunConfig at_point(RunConfig cfg, double delta, double nu)
{
    cfg.point.delta_eff = delta;
    cfg.point.nu = nu;
    return cfg;
}

void reproduce(const std::string &fig, const RunConfig &base, ResultBundle &b)
{
    if (fig == "2b") {
        RunConfig c = at_point(base, 12.0, 1.05);
        c.squeeze.supermode_omegas = {0.0, 10.0};
        cmd_squeeze(c, {b, ""});
    } else if (fig == "2c") {
        RunConfig c = at_point(base, 0.0, 0.95);
        c.squeeze.supermodes = 3;
        c.squeeze.supermode_omegas = {0.0};
        cmd_squeeze(c, {b, ""});
        c.oracle.nu = 0.95;
        c.oracle.delta = 0.0;
        c.oracle.eta = c.normalized().coupling_efficiency();
        c.oracle.omega_max = c.squeeze.omega_max;
        c.oracle.omega_points = c.squeeze.omega_points;
        cmd_oracle(c, {b, "oracle"});
    } else if (fig == "3") {
        RunConfig c = at_point(base, 12.0, 1.05);
        cmd_supermodes(c, {b, ""});
    } else if (fig == "4") {
        RunConfig q = at_point(base, 12.0, 1.05);
        q.quartic = true;
        const EnvelopeResult a = envelope_for(q, {b, "quartic"});
        q.quartic = false;
        const EnvelopeResult d = envelope_for(q, {b, "quadratic"});
        b.summary()["background_ratio"] = d.metric > 0.0 ? Json(a.metric / d.metric) : Json(nullptr);
    } else if (fig == "S1") {
        RunConfig c = at_point(base, 0.0, 0.95);
        c.squeeze.supermodes = 4;
        cmd_supermodes(c, {b, ""});
    } else if (fig == "S2") {
        RunConfig c = at_point(base, 0.0, 0.95);
        cmd_scan(c, {b, ""});
    } else if (fig == "S3") {
        const std::vector<std::pair<std::string, std::pair<double, double>>> pts{{"ss_1.2_1.05", {1.2, 1.05}},
                                                                                {"os_12_1.5", {12.0, 1.5}}};
        for (const auto &[dir, pt] : pts) {
            RunConfig c = at_point(base, pt.first, pt.second);
            Sink s{b, dir};
            const ClassicalState cs = solve_classical(c, c.normalized());
            CsvTable t;
            t.header = {"delta_eff", "nu", "label", "residual"};
            t.add_row({fmt(pt.first), fmt(pt.second), to_string(cs.label.regime), fmt(cs.residual)});
            s.csv("steady.csv", t, "steady-state label");
            s.csv("state_spectrum.csv", state_csv(cs.state), "final state (mu,re,im)");
            Json d = diagnostics_json(cs.label);
            d["seed"] = cs.seed;
            s.json("steady.json", d, "regime diagnostics");
            s.summary()["label"] = to_string(cs.label.regime);
            if (cs.label.regime == Regime::StableSoliton) {
                c.squeeze.state_file.clear();
                const Linearized lin = [&] {
                    Linearized l;
                    l.p = c.normalized();
                    l.state = cs.state;
                    l.label = cs.label;
                    l.gf = build_GF(assemble_pumped_spectrum(l.state, l.p), l.p, c.squeeze.coupling);
                    l.M = assemble_M(l.gf);
                    l.loss = LossMatrix::from(l.p);
                    return l;
                }();
                spectrum_for(lin, c, s);
            }
        }
    } else if (fig == "S4") {
        RunConfig c = at_point(base, 12.0, 1.05);
        c.quartic = false;
        cmd_squeeze(c, {b, "spectrum"});
        cmd_supermodes(c, {b, "supermodes"});
    } else {
        std::string names;
        for (const auto &f : figure_presets())
            names += " " + f.first;
        throw ValidationError("unknown figure '" + fig + "'; choose one of" + names);
    }
}

} // namespace

ClassicalState solve_classical(const RunConfig &cfg, const NormalizedParams &p)
{
    ClassicalState out;
    const std::string &seed = cfg.steady.seed;
    if (seed == "auto") {
        const std::vector<SweepPoint> pts =
            phase_diagram_sweep({p.delta_eff}, {std::abs(p.nu)}, p, sweep_options(cfg));
        SweepPoint pt = pts.front();
        if (!pt.error.empty())
            throw NumericalError(pt.error);
        out.state = std::move(pt.state);
        out.label = pt.label;
        out.residual = pt.residual;
        out.seed = pt.seed;
        return out;
    }
    if (seed == "zero") {
        out.state = FieldState::zeros(p.mode_count);
        out.label.regime = Regime::BelowThreshold;
        out.seed = seed;
        return out;
    }
    FieldState start;
    if (seed == "soliton-pair")
        start = refined_soliton_pair(p);
    else if (seed == "single-soliton")
        start = refined_seed(init_single_soliton(p), p);
    else if (seed == "noise")
        start = init_noise(p, cfg.steady.noise_amplitude, cfg.steady.noise_seed);
    else
        throw ValidationError("steady.seed: unknown seed '" + seed + "'");
    SteadyStateResult r = find_steady_state(start, p, steady_options(cfg));
    out.state = std::move(r.state);
    out.label = r.label;
    out.residual = r.residual;
    out.seed = seed;
    return out;
}

void run(const std::string &subcommand, const RunConfig &cfg, const std::string &figure)
{
    cfg.validate();
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
        throw ValidationError("unknown subcommand '" + subcommand + "'");
    if (subcommand == "reproduce-figure") {
        const auto &f = figure_presets();
        if (std::none_of(f.begin(), f.end(), [&](const auto &x) { return x.first == figure; }))
            throw ValidationError("unknown figure '" + figure + "'");
    }
    if (cfg.threads > 0)
        omp_set_num_threads(cfg.threads);

    ResultBundle b(cfg.out_dir, subcommand + (figure.empty() ? "" : " " + figure), canonical_config(cfg));
    try {
        Sink root{b, ""};
        if (subcommand == "steady")
            cmd_steady(cfg, root);
        else if (subcommand == "sweep")
            cmd_sweep(cfg, root);
        else if (subcommand == "squeeze")
            cmd_squeeze(cfg, root);
        else if (subcommand == "supermodes")
            cmd_supermodes(cfg, root);
        else if (subcommand == "envelope")
            cmd_envelope(cfg, root);
        else if (subcommand == "oracle")
            cmd_oracle(cfg, root);
        else
            reproduce(figure, cfg, b);
    } catch (const std::exception &e) {
        b.log(std::string("error: ") + e.what());
        b.finish("failed", e.what());
        throw;
    }
    b.finish("ok");
}

} // namespace pdcs
