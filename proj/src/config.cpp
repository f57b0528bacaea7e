#include "pdcs/config.hpp"

#include "pdcs/errors.hpp"
#include "pdcs/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace pdcs {

namespace {

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &text, const std::string &key)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
        throw ValidationError(key + ": expected a finite number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string &text, const std::string &key)
{
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ValidationError(key + ": expected an integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string &text, const std::string &key)
{
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on")
        return true;
    if (t == "false" || t == "0" || t == "no" || t == "off")
        return false;
    throw ValidationError(key + ": expected a boolean, got '" + text + "'");
}

template <class T> std::string join(const std::vector<T> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ",";
        if constexpr (std::is_floating_point_v<T>)
            s += format_double(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

struct Field {
    std::function<void(const std::string &, const std::string &)> set; // (value, key path)
    std::function<std::string()> get;
};

using Registry = std::map<std::string, std::map<std::string, Field>>;

Field real(double &x)
{
    return {[&x](const std::string &v, const std::string &k) { x = to_double(v, k); },
            [&x] { return format_double(x); }};
}
Field integer(int &x)
{
    return {[&x](const std::string &v, const std::string &k) {
                const long long n = to_integer(v, k);
                if (n < INT32_MIN || n > INT32_MAX)
                    throw ValidationError(k + ": integer out of range");
                x = static_cast<int>(n);
            },
            [&x] { return std::to_string(x); }};
}
Field unsigned64(std::uint64_t &x)
{
    return {[&x](const std::string &v, const std::string &k) {
                const long long n = to_integer(v, k);
                if (n < 0)
                    throw ValidationError(k + ": must be non-negative");
                x = static_cast<std::uint64_t>(n);
            },
            [&x] { return std::to_string(x); }};
}
Field boolean(bool &x)
{
    return {[&x](const std::string &v, const std::string &k) { x = to_bool(v, k); },
            [&x] { return std::string(x ? "true" : "false"); }};
}
Field text(std::string &x)
{
    return {[&x](const std::string &v, const std::string &) { x = trim(v); }, [&x] { return x; }};
}

Registry registry(RunConfig &c)
{
    Registry r;
    auto &ph = r["physical"];
    ph["fsr_hz"] = real(c.physical.fsr_hz);
    ph["finesse"] = real(c.physical.finesse);
    ph["d2_hz"] = real(c.physical.d2_hz);
    ph["d4_hz"] = real(c.physical.d4_hz);
    ph["kerr_coeff"] = real(c.physical.kerr_coeff);
    ph["cavity_length_m"] = real(c.physical.cavity_length_m);
    ph["pump_mode_index"] = integer(c.physical.pump_mode_index);
    ph["mode_count"] = integer(c.physical.mode_count);
    ph["overcoupling_ratio"] = real(c.overcoupling_ratio);
    ph["quartic"] = boolean(c.quartic);

    auto &pt = r["point"];
    pt["delta_eff"] = real(c.point.delta_eff);
    pt["nu"] = real(c.point.nu);
    pt["nu_phase"] = real(c.point.nu_phase);

    auto &sw = r["sweep"];
    sw["delta_min"] = real(c.sweep.delta_min);
    sw["delta_max"] = real(c.sweep.delta_max);
    sw["delta_points"] = integer(c.sweep.delta_points);
    sw["nu_min"] = real(c.sweep.nu_min);
    sw["nu_max"] = real(c.sweep.nu_max);
    sw["nu_points"] = integer(c.sweep.nu_points);

    auto &st = r["steady"];
    st["seed"] = text(c.steady.seed);
    st["dt"] = real(c.steady.dt);
    st["limit_step"] = boolean(c.steady.limit_step);
    st["tol"] = real(c.steady.tol);
    st["max_time"] = real(c.steady.max_time);
    st["noise_amplitude"] = real(c.steady.noise_amplitude);
    st["noise_seed"] = unsigned64(c.steady.noise_seed);
    st["break_symmetry"] = boolean(c.steady.break_symmetry);

    auto &sq = r["squeeze"];
    sq["omega_min"] = real(c.squeeze.omega_min);
    sq["omega_max"] = real(c.squeeze.omega_max);
    sq["omega_points"] = integer(c.squeeze.omega_points);
    sq["levels"] = integer(c.squeeze.levels);
    sq["supermodes"] = integer(c.squeeze.supermodes);
    sq["supermode_omegas"] = {[&c](const std::string &v, const std::string &k) {
                                  c.squeeze.supermode_omegas = parse_double_list(v, k);
                              },
                              [&c] { return join(c.squeeze.supermode_omegas); }};
    sq["coupling"] = {[&c](const std::string &v, const std::string &k) {
                          try {
                              c.squeeze.coupling = pump_coupling_from_string(trim(v));
                          } catch (const ValidationError &e) {
                              throw ValidationError(k + ": " + e.what());
                          }
                      },
                      [&c] { return to_string(c.squeeze.coupling); }};
    sq["state_file"] = text(c.squeeze.state_file);
    sq["pairing_tol"] = real(c.squeeze.pairing_tol);
    sq["qdw_window"] = real(c.squeeze.qdw_window);

    auto &en = r["envelope"];
    en["omega_max"] = real(c.envelope.omega_max);
    en["omega_points"] = integer(c.envelope.omega_points);
    en["theta_points"] = integer(c.envelope.theta_points);
    en["remove_neutral_modes"] = boolean(c.envelope.remove_neutral_modes);
    en["skip_zero"] = boolean(c.envelope.skip_zero);
    en["convergence_tol"] = real(c.envelope.convergence_tol);
    en["exclusion_halfwidth"] = real(c.envelope.exclusion_halfwidth);

    auto &orc = r["oracle"];
    orc["nu"] = real(c.oracle.nu);
    orc["delta"] = real(c.oracle.delta);
    orc["eta"] = real(c.oracle.eta);
    orc["omega_max"] = real(c.oracle.omega_max);
    orc["omega_points"] = integer(c.oracle.omega_points);

    auto &sc = r["scan"];
    sc["modes"] = {[&c](const std::string &v, const std::string &k) { c.scan.modes = parse_int_list(v, k); },
                   [&c] { return join(c.scan.modes); }};
    sc["points"] = integer(c.scan.points);
    sc["span_fraction"] = real(c.scan.span_fraction);

    auto &rn = r["run"];
    rn["threads"] = integer(c.threads);
    rn["out_dir"] = text(c.out_dir);
    return r;
}

void check(bool ok, const std::string &key, const std::string &msg)
{
    if (!ok)
        throw ValidationError(key + ": " + msg);
}

} // namespace

std::vector<double> SweepGridConfig::deltas() const { return linspace(delta_min, delta_max, delta_points); }
std::vector<double> SweepGridConfig::nus() const { return linspace(nu_min, nu_max, nu_points); }

std::vector<double> parse_double_list(const std::string &t, const std::string &key)
{
    std::vector<double> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(to_double(item, key));
    return out;
}

std::vector<int> parse_int_list(const std::string &t, const std::string &key)
{
    std::vector<int> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(static_cast<int>(to_integer(item, key)));
    return out;
}

NormalizedParams RunConfig::normalized(double delta_eff, double nu_mag) const
{
    NormalizedParams p = normalize(physical, delta_eff, std::polar(nu_mag, point.nu_phase), overcoupling_ratio);
    if (!quartic) {
        std::map<int, double> d = normalized_coefficients(physical);
        d.erase(4);
        p = with_dispersion(p, d);
    }
    return p;
}

NormalizedParams RunConfig::normalized() const { return normalized(point.delta_eff, point.nu); }

void RunConfig::validate() const
{
    try {
        physical.validate();
    } catch (const ValidationError &e) {
        throw ValidationError(std::string("physical: ") + e.what());
    }
    check(overcoupling_ratio > 0.0 && overcoupling_ratio <= 1.0, "physical.overcoupling_ratio", "must lie in (0, 1]");
    check(point.nu >= 0.0, "point.nu", "is the drive modulus and must be non-negative");

    check(sweep.delta_points >= 1, "sweep.delta_points", "empty sweep grid");
    check(sweep.nu_points >= 1, "sweep.nu_points", "empty sweep grid");
    check(sweep.delta_points == 1 || sweep.delta_max > sweep.delta_min, "sweep.delta_max", "grid must be increasing");
    check(sweep.nu_points == 1 || sweep.nu_max > sweep.nu_min, "sweep.nu_max", "grid must be increasing");
    check(sweep.nu_min >= 0.0, "sweep.nu_min", "must be non-negative");

    const std::vector<std::string> seeds{"auto", "soliton-pair", "single-soliton", "noise", "zero"};
    check(std::find(seeds.begin(), seeds.end(), steady.seed) != seeds.end(), "steady.seed",
          "must be auto, soliton-pair, single-soliton, noise or zero");
    check(steady.dt > 0.0, "steady.dt", "must be positive");
    check(steady.tol > 0.0, "steady.tol", "must be positive");
    check(steady.max_time > 0.0, "steady.max_time", "must be positive");
    check(steady.noise_amplitude > 0.0, "steady.noise_amplitude", "must be positive");

    check(squeeze.omega_points >= 1, "squeeze.omega_points", "empty omega grid");
    check(squeeze.omega_points == 1 || squeeze.omega_max > squeeze.omega_min, "squeeze.omega_max",
          "must exceed omega_min");
    const int two_n = 2 * physical.mode_count;
    check(squeeze.levels >= 0 && squeeze.levels <= two_n, "squeeze.levels", "must lie in [0, 2N]");
    check(squeeze.supermodes >= 1 && squeeze.supermodes <= two_n, "squeeze.supermodes", "must lie in [1, 2N]");
    check(squeeze.pairing_tol > 0.0, "squeeze.pairing_tol", "must be positive");
    check(squeeze.qdw_window >= 0.0, "squeeze.qdw_window", "must be non-negative");

    check(envelope.omega_max > 0.0, "envelope.omega_max", "must be positive");
    check(envelope.omega_points >= 3, "envelope.omega_points", "needs at least three samples");
    check(envelope.theta_points >= physical.mode_count, "envelope.theta_points", "must be at least mode_count");
    check(envelope.convergence_tol > 0.0, "envelope.convergence_tol", "must be positive");
    check(envelope.exclusion_halfwidth >= 0.0, "envelope.exclusion_halfwidth", "must be non-negative");

    check(oracle.nu >= 0.0 && oracle.nu < 1.0, "oracle.nu", "closed form needs 0 <= nu < 1");
    check(oracle.eta > 0.0 && oracle.eta <= 1.0, "oracle.eta", "must lie in (0, 1]");
    check(oracle.omega_max >= 0.0, "oracle.omega_max", "must be non-negative");
    check(oracle.omega_points >= 1, "oracle.omega_points", "empty omega grid");

    check(!scan.modes.empty(), "scan.modes", "needs at least one mode");
    for (int mu : scan.modes)
        check(std::abs(mu) <= physical.mode_count / 2 - 1, "scan.modes", "mode " + std::to_string(mu) + " is off the grid");
    check(scan.points >= 2, "scan.points", "needs at least two points");
    check(scan.span_fraction > 0.0, "scan.span_fraction", "must be positive");
    check(threads >= 0, "run.threads", "must be non-negative");
}

RunConfig parse_config(const std::string &ini_text, const std::string &origin)
{
    boost::property_tree::ptree tree;
    std::istringstream in(ini_text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error &e) {
        throw ValidationError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    RunConfig cfg;
    Registry reg = registry(cfg);
    for (const auto &[section, body] : tree) {
        auto sec = reg.find(section);
        if (sec == reg.end()) {
            if (body.empty())
                throw ValidationError(origin + ": key '" + section + "' outside any section");
            throw ValidationError(origin + ": unknown section '" + section + "'");
        }
        for (const auto &[key, value] : body) {
            const std::string path = section + "." + key;
            auto f = sec->second.find(key);
            if (f == sec->second.end())
                throw ValidationError(origin + ": unknown key '" + path + "'");
            f->second.set(value.data(), path);
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string &path)
{
    return parse_config(read_text_file(path), path);
}

std::string canonical_config(const RunConfig &cfg)
{
    RunConfig copy = cfg;
    const Registry reg = registry(copy);
    std::string out;
    // [run] only says where and how fast; it leaves the results unchanged
    for (const auto &[section, keys] : reg) {
        if (section == "run")
            continue;
        out += "[" + section + "]\n";
        for (const auto &[key, f] : keys)
            out += key + " = " + f.get() + "\n";
    }
    return out;
}

} // namespace pdcs
