#include "pdcs/io.hpp"

#include "pdcs/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace pdcs {

std::string format_double(double x)
{
    if (x == 0.0)
        return "0"; // folds -0
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{})
        throw NumericalError("cannot format number");
    return std::string(buf.data(), ptr);
}

std::string read_text_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void CsvTable::add_row(std::vector<std::string> row)
{
    require(row.size() == header.size(), "CSV row width does not match the header");
    rows.push_back(std::move(row));
}

void CsvTable::add_numeric_row(const std::vector<double> &row)
{
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row)
        cells.push_back(format_double(v));
    add_row(std::move(cells));
}

namespace {
void append_line(std::string &out, const std::vector<std::string> &cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out += ',';
        out += cells[i];
    }
    out += '\n';
}

std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}
} // namespace

std::string to_csv(const CsvTable &t)
{
    std::string out;
    append_line(out, t.header);
    for (const auto &r : t.rows)
        append_line(out, r);
    return out;
}

CsvTable parse_csv(const std::string &text, const std::string &origin)
{
    CsvTable t;
    std::stringstream ss(text);
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto cells = split(line);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size())
                throw ValidationError(origin + ": line " + std::to_string(lineno) + " has " +
                                      std::to_string(cells.size()) + " cells, header has " +
                                      std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    if (first)
        throw ValidationError(origin + ": empty CSV");
    return t;
}

std::uint64_t fnv1a64(const std::string &data)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t h)
{
    static const char *digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

namespace {
std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}
} // namespace

ResultBundle::ResultBundle(std::filesystem::path dir, std::string subcommand, std::string config_text)
    : dir_(std::move(dir)), subcommand_(std::move(subcommand)), config_text_(std::move(config_text))
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

void ResultBundle::record(const std::string &name, const std::string &content, const std::string &role)
{
    const std::filesystem::path path = dir_ / name;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
    Json f = Json::object();
    f["path"] = name;
    f["role"] = role;
    f["bytes"] = content.size();
    f["fnv1a64"] = hex64(fnv1a64(content));
    files_.push_back(std::move(f));
}

void ResultBundle::write_csv(const std::string &name, const CsvTable &t, const std::string &role)
{
    record(name, to_csv(t), role);
}

void ResultBundle::write_json(const std::string &name, const Json &j, const std::string &role)
{
    record(name, j.dump(2) + "\n", role);
}

void ResultBundle::write_text(const std::string &name, const std::string &text, const std::string &role)
{
    record(name, text, role);
}

void ResultBundle::log(const std::string &line) { log_.push_back(line); }

std::vector<std::string> ResultBundle::files() const
{
    std::vector<std::string> out;
    for (const auto &f : files_)
        out.push_back(f["path"].get<std::string>());
    return out;
}

void ResultBundle::finish(const std::string &status, const std::string &error)
{
    std::string text;
    for (const auto &l : log_)
        text += l + "\n";
    record("diagnostics.log", text, "diagnostics");

    Json m = Json::object();
    m["tool"] = "pdcs";
    m["version"] = PDCS_VERSION;
    m["created_utc"] = utc_now();
    m["subcommand"] = subcommand_;
    m["status"] = status;
    if (!error.empty())
        m["error"] = error;
    m["config_hash"] = hex64(fnv1a64(config_text_));
    m["config"] = config_text_;
    m["summary"] = summary_;
    m["files"] = files_;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
    if (!out)
        throw std::runtime_error("failed writing manifest in '" + dir_.string() + "'");
}

CsvTable state_csv(const FieldState &state)
{
    const FieldState s = state.to_spectral();
    const ModeGrid g = s.grid();
    CsvTable t;
    t.header = {"mu", "re", "im"};
    for (std::size_t i = 0; i < s.values().size(); ++i)
        t.add_row({std::to_string(g.mu(i)), format_double(s.values()[i].real()), format_double(s.values()[i].imag())});
    return t;
}

FieldState read_state_csv(const std::string &path, int mode_count)
{
    const CsvTable t = parse_csv(read_text_file(path), path);
    if (t.header != std::vector<std::string>{"mu", "re", "im"})
        throw ValidationError(path + ": expected header mu,re,im");
    const ModeGrid g(mode_count);
    std::vector<cplx> v(static_cast<std::size_t>(mode_count), cplx{});
    std::vector<bool> seen(v.size(), false);
    for (const auto &r : t.rows) {
        int mu = 0;
        double re = 0.0, im = 0.0;
        const auto ok = [&](const std::string &s, auto &x) {
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
            return ec == std::errc{} && p == s.data() + s.size();
        };
        if (!ok(r[0], mu) || !ok(r[1], re) || !ok(r[2], im))
            throw ValidationError(path + ": malformed row");
        if (!g.contains(mu))
            throw ValidationError(path + ": mode " + std::to_string(mu) + " is off the grid");
        v[g.index(mu)] = {re, im};
        seen[g.index(mu)] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw ValidationError(path + ": mode " + std::to_string(g.mu(i)) + " missing");
    return FieldState::spectral(std::move(v));
}

std::string dense_matrix_csv(const Eigen::MatrixXd &m)
{
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c)
                out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

CsvTable triplet_csv(const Eigen::MatrixXcd &m)
{
    CsvTable t;
    t.header = {"row", "col", "re", "im"};
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (m(r, c) != cplx{})
                t.add_row({std::to_string(r), std::to_string(c), format_double(m(r, c).real()),
                           format_double(m(r, c).imag())});
    return t;
}

} // namespace pdcs
