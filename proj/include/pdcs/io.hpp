#pragma once

#include "pdcs/field.hpp"

#include <Eigen/Dense>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pdcs {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

std::string read_text_file(const std::string &path);

/// Rectangular table of pre-formatted cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    void add_numeric_row(const std::vector<double> &row);
};

std::string to_csv(const CsvTable &t);
/// Parses a header + rows CSV (no quoting); throws ValidationError on ragged input.
CsvTable parse_csv(const std::string &text, const std::string &origin = "<string>");

/// 64-bit FNV-1a, used for content and config hashes.
std::uint64_t fnv1a64(const std::string &data);
std::string hex64(std::uint64_t h);

/// An output directory that records every file it writes and finishes with manifest.json.
class ResultBundle {
public:
    ResultBundle(std::filesystem::path dir, std::string subcommand, std::string config_text);

    const std::filesystem::path &dir() const noexcept { return dir_; }

    void write_csv(const std::string &name, const CsvTable &t, const std::string &role);
    void write_json(const std::string &name, const Json &j, const std::string &role);
    void write_text(const std::string &name, const std::string &text, const std::string &role);

    /// Line appended to diagnostics.log (written with the manifest).
    void log(const std::string &line);
    Json &summary() noexcept { return summary_; }

    /// Writes diagnostics.log and manifest.json. status is "ok" or "failed".
    void finish(const std::string &status, const std::string &error = {});

    std::vector<std::string> files() const;

private:
    void record(const std::string &name, const std::string &content, const std::string &role);

    std::filesystem::path dir_;
    std::string subcommand_;
    std::string config_text_;
    Json files_ = Json::array();
    Json summary_ = Json::object();
    std::vector<std::string> log_;
};

/// Field spectrum as mu,re,im rows; read_state_csv inverts it.
CsvTable state_csv(const FieldState &state);
FieldState read_state_csv(const std::string &path, int mode_count);

/// Dense real matrix, one CSV row per matrix row, no header.
std::string dense_matrix_csv(const Eigen::MatrixXd &m);
/// Nonzero entries as row,col,re,im triplets.
CsvTable triplet_csv(const Eigen::MatrixXcd &m);

} // namespace pdcs
