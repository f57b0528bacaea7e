#include "pdcs/config.hpp"
#include "pdcs/errors.hpp"
#include "pdcs/io.hpp"
#include "pdcs/mean_field.hpp"
#include "pdcs/run.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace pdcs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name)
{
    const fs::path p = fs::temp_directory_path() / ("pdcs_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string small_ini(const std::string &extra = {})
{
    return "[physical]\nmode_count = 40\npump_mode_index = 15\n"
           "[point]\ndelta_eff = 0\nnu = 0.95\n"
           "[squeeze]\nomega_max = 4\nomega_points = 5\nsupermodes = 3\nsupermode_omegas = 0, 2\n"
           "[envelope]\nomega_max = 10\nomega_points = 21\ntheta_points = 64\n"
           "[scan]\nmodes = 0, 5\n" +
           extra;
}

RunConfig small_config(const fs::path &out, const std::string &extra = {})
{
    RunConfig c = parse_config(small_ini(extra));
    c.out_dir = out.string();
    return c;
}

Json manifest(const fs::path &dir) { return Json::parse(read_text_file((dir / "manifest.json").string())); }

std::set<std::string> listed(const Json &m)
{
    std::set<std::string> s;
    for (const auto &f : m["files"])
        s.insert(f["path"].get<std::string>());
    return s;
}

std::set<std::string> on_disk(const fs::path &dir)
{
    std::set<std::string> s;
    for (const auto &e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "manifest.json")
            s.insert(fs::relative(e.path(), dir).generic_string());
    return s;
}

int cli(const std::string &args)
{
    const std::string cmd = std::string(PDCS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("config: defaults, overrides and canonical dump")
{
    const RunConfig d = parse_config("");
    CHECK(d.point.delta_eff == 12.0);
    CHECK(d.envelope.omega_points == 401);
    const RunConfig c = parse_config(small_ini());
    CHECK(c.physical.mode_count == 40);
    CHECK(c.squeeze.supermode_omegas == std::vector<double>{0.0, 2.0});
    CHECK(c.scan.modes == std::vector<int>{0, 5});
    const RunConfig again = parse_config(canonical_config(c));
    CHECK(canonical_config(again) == canonical_config(c));
}

TEST_CASE("config: unknown keys and bad values name their path")
{
    auto message = [](const std::string &ini) {
        try {
            parse_config(ini, "cfg.ini");
        } catch (const ValidationError &e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("[squeeze]\nbogus = 1\n").find("squeeze.bogus") != std::string::npos);
    CHECK(message("[nowhere]\nx = 1\n").find("nowhere") != std::string::npos);
    CHECK(message("[point]\nnu = abc\n").find("point.nu") != std::string::npos);
    CHECK(message("[squeeze]\ncoupling = weird\n").find("squeeze.coupling") != std::string::npos);
    CHECK(message("[steady]\nseed = magic\n").find("steady.seed") != std::string::npos);
}

TEST_CASE("config: validation names the key path")
{
    RunConfig c;
    c.sweep.delta_points = 0;
    try {
        c.validate();
        FAIL("expected a validation error");
    } catch (const ValidationError &e) {
        CHECK(std::string(e.what()).find("sweep.delta_points") != std::string::npos);
    }
    c = RunConfig{};
    c.squeeze.omega_points = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = RunConfig{};
    c.physical.mode_count = 7;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = RunConfig{};
    c.point.nu = -1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("empty sweep grid is rejected before any output")
{
    const fs::path out = scratch("empty_sweep");
    RunConfig c = small_config(out);
    c.sweep.nu_points = 0;
    CHECK_THROWS_AS(run("sweep", c), ValidationError);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("numbers round trip through their decimal form")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV round trip and shape checks")
{
    CsvTable t;
    t.header = {"omega", "level_1", "level_2"};
    t.add_numeric_row({0.0, -19.7667, 3.25});
    t.add_numeric_row({0.1, -1e-300, 1e300});
    const CsvTable back = parse_csv(to_csv(t));
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK_THROWS(t.add_row({"1"}));
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ValidationError);
}

TEST_CASE("state spectrum round trip")
{
    PhysicalParams pp;
    pp.mode_count = 40;
    pp.pump_mode_index = 15;
    const FieldState s = init_noise(normalize(pp, 1.0, 1.1), 0.3, 9);
    const fs::path dir = scratch("state");
    fs::create_directories(dir);
    const fs::path f = dir / "s.csv";
    {
        std::ofstream o(f);
        o << to_csv(state_csv(s));
    }
    const FieldState r = read_state_csv(f.string(), 40);
    CHECK(r.values() == s.values());
    CHECK_THROWS_AS(read_state_csv(f.string(), 20), ValidationError);
}

TEST_CASE("triplet and dense matrix dumps")
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
    m(0, 2) = {1.5, -2.0};
    m(2, 1) = {0.0, 1.0};
    const CsvTable t = triplet_csv(m);
    CHECK(t.header == std::vector<std::string>{"row", "col", "re", "im"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"0", "2", "1.5", "-2"});
    Eigen::MatrixXd d(2, 2);
    d << 1, 2, 3, 4.5;
    CHECK(dense_matrix_csv(d) == "1,2\n3,4.5\n");
}

TEST_CASE("manifest JSON keeps key order and round trips")
{
    Json j = Json::object();
    j["zeta"] = 1;
    j["alpha"] = {{"b", 2.5}, {"a", "x"}};
    const Json back = Json::parse(j.dump(2));
    CHECK(back == j);
    CHECK(back.begin().key() == "zeta");
}

TEST_CASE("squeeze bundle: files, headers, completeness, determinism")
{
    const fs::path a = scratch("squeeze_a"), b = scratch("squeeze_b");
    run("squeeze", small_config(a));
    run("squeeze", small_config(b));
    const Json m = manifest(a);
    CHECK(m["status"] == "ok");
    CHECK(m["subcommand"] == "squeeze");
    CHECK(m["summary"]["regime"] == "BT");
    CHECK(listed(m) == on_disk(a));
    for (const char *f : {"spectrum.csv", "F.csv", "G.csv", "M.csv", "state_spectrum.csv", "pairing.csv",
                          "supermodes/omega_0_rank_1.csv", "supermodes/omega_2_rank_3.csv", "decomposition.json"})
        CHECK(listed(m).count(f) == 1);
    const CsvTable sp = parse_csv(read_text_file((a / "spectrum.csv").string()));
    CHECK(sp.header.front() == "omega");
    CHECK(sp.header[1] == "level_1");
    CHECK(sp.header.back() == "level_80");
    CHECK(sp.rows.size() == 5);
    const CsvTable sm = parse_csv(read_text_file((a / "supermodes/omega_0_rank_1.csv").string()));
    CHECK(sm.header == std::vector<std::string>{"mu", "reX", "imX", "reP", "imP"});
    CHECK(std::stod(sp.rows[0][1]) == doctest::Approx(-19.77).epsilon(0.003));
    for (const auto &f : listed(m))
        if (f.ends_with(".csv"))
            CHECK_MESSAGE(read_text_file((a / f).string()) == read_text_file((b / f).string()), f);
    CHECK(manifest(b)["config_hash"] == m["config_hash"]);
}

TEST_CASE("oracle, envelope, supermodes and sweep bundles")
{
    const fs::path o = scratch("oracle");
    RunConfig c = small_config(o);
    c.oracle.omega_points = 11;
    run("oracle", c);
    const CsvTable t = parse_csv(read_text_file((o / "oracle.csv").string()));
    CHECK(t.header == std::vector<std::string>{"omega", "min_dB", "max_dB"});
    CHECK(t.rows.size() == 11);
    CHECK(std::stod(t.rows[0][1]) == doctest::Approx(-19.7667).epsilon(1e-4));

    const fs::path e = scratch("envelope");
    run("envelope", small_config(e));
    const CsvTable env = parse_csv(read_text_file((e / "envelope.csv").string()));
    CHECK(env.header == std::vector<std::string>{"theta", "noise", "classical_intensity_normalized"});
    CHECK(env.rows.size() == 64);
    CHECK(manifest(e)["summary"].contains("converged"));

    const fs::path s = scratch("supermodes");
    run("supermodes", small_config(s));
    const CsvTable track = parse_csv(read_text_file((s / "supermode_summary.csv").string()));
    CHECK(track.header == std::vector<std::string>{"omega", "rank", "level_db", "dominant_mu", "qdw_localization", "degenerate"});
    CHECK(track.rows.size() == 15);
    CHECK(listed(manifest(s)) == on_disk(s));

    const fs::path w = scratch("sweep");
    RunConfig sc = small_config(w, "[sweep]\ndelta_min = 0\ndelta_max = 2\ndelta_points = 2\nnu_min = 0.5\nnu_max = 0.9\nnu_points = 2\n");
    run("sweep", sc);
    const CsvTable sw = parse_csv(read_text_file((w / "sweep.csv").string()));
    CHECK(sw.header == std::vector<std::string>{"delta_eff", "nu", "label", "residual"});
    REQUIRE(sw.rows.size() == 4);
    for (const auto &r : sw.rows)
        CHECK(r[2] == "BT");
    CHECK(listed(manifest(w)) == on_disk(w));
    CHECK(fs::exists(w / "states/state_d1_n1.csv"));
}

TEST_CASE("failed runs still write a manifest")
{
    const fs::path out = scratch("failed");
    RunConfig c = small_config(out, "[steady]\nseed = noise\nmax_time = 1\nnoise_amplitude = 0.1\n");
    c.point.delta_eff = 2.0;
    c.point.nu = 3.0;
    CHECK_THROWS_AS(run("squeeze", c), NumericalError);
    const Json m = manifest(out);
    CHECK(m["status"] == "failed");
    CHECK(m.contains("error"));
    CHECK(listed(m) == on_disk(out));
}

TEST_CASE("command line exit codes")
{
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    const fs::path ok_ini = dir / "ok.ini", bad_ini = dir / "bad.ini", num_ini = dir / "num.ini";
    std::ofstream(ok_ini) << small_ini();
    std::ofstream(bad_ini) << small_ini("[run]\nbogus = 1\n");
    std::string num = small_ini("[steady]\nseed = noise\nmax_time = 1\nnoise_amplitude = 0.1\n");
    num.replace(num.find("delta_eff = 0\nnu = 0.95"), 23, "delta_eff = 2\nnu = 3.0");
    std::ofstream(num_ini) << num;
    CHECK(cli("oracle --config " + ok_ini.string() + " --out " + (dir / "o").string() + " --omega-points 7") == 0);
    CHECK(parse_csv(read_text_file((dir / "o/oracle.csv").string())).rows.size() == 7);
    CHECK(cli("oracle --config " + bad_ini.string() + " --out " + (dir / "b").string()) == 2);
    CHECK(cli("oracle --config " + (dir / "missing.ini").string()) == 2);
    CHECK(cli("frobnicate") == 2);
    CHECK(cli("oracle --threads notanumber") == 2);
    CHECK(cli("reproduce-figure 9z --out " + (dir / "f").string()) == 2);
    CHECK(cli("reproduce-figure --list") == 0);
    // no stationary state at the configured point
    CHECK(cli("squeeze --config " + num_ini.string() + " --out " + (dir / "n").string()) == 3);
    CHECK(cli("squeeze --d4-zero --config " + ok_ini.string() + " --out " + (dir / "q").string()) == 0);
    CHECK(manifest(dir / "q")["summary"]["dispersion"] == "quadratic");
}
