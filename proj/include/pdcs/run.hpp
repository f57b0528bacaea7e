#pragma once

#include "pdcs/config.hpp"
#include "pdcs/io.hpp"
#include "pdcs/mean_field.hpp"

#include <string>
#include <vector>

namespace pdcs {

/// Subcommands accepted by run().
const std::vector<std::string> &subcommands();
/// Figure presets for reproduce-figure, with the parameter points they use.
const std::vector<std::pair<std::string, std::string>> &figure_presets();

/// Classical state at the configured point, chosen by cfg.steady.seed.
struct ClassicalState {
    FieldState state;
    RegimeLabel label;
    double residual = 0.0;
    std::string seed;
};
ClassicalState solve_classical(const RunConfig &cfg, const NormalizedParams &p);

/// Executes one subcommand (figure used only by reproduce-figure) and writes its bundle into
/// cfg.out_dir. On failure the manifest is written with status "failed" before rethrowing.
void run(const std::string &subcommand, const RunConfig &cfg, const std::string &figure = {});

} // namespace pdcs
