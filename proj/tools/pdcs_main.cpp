#include "pdcs/config.hpp"
#include "pdcs/errors.hpp"
#include "pdcs/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Overrides {
    std::string config;
    std::string out;
    int threads = -1;
    std::optional<double> omega_max;
    std::optional<int> omega_points;
    bool d4_zero = false;
};

void add_common(CLI::App *cmd, Overrides &o)
{
    cmd->add_option("--config", o.config, "INI configuration file");
    cmd->add_option("--out", o.out, "output directory (default from run.out_dir)");
    cmd->add_option("--threads", o.threads, "OpenMP threads (0 = runtime default)");
    cmd->add_option("--omega-max", o.omega_max, "upper end of the analysis-frequency grid");
    cmd->add_option("--omega-points", o.omega_points, "number of analysis frequencies");
    cmd->add_flag("--d4-zero", o.d4_zero, "drop the quartic dispersion term");
}

pdcs::RunConfig build_config(const std::string &sub, const Overrides &o)
{
    pdcs::RunConfig cfg = o.config.empty() ? pdcs::RunConfig{} : pdcs::load_config(o.config);
    if (!o.out.empty())
        cfg.out_dir = o.out;
    if (o.threads >= 0)
        cfg.threads = o.threads;
    if (o.d4_zero)
        cfg.quartic = false;
    const bool all = sub == "reproduce-figure";
    if (o.omega_max) {
        if (all || sub == "squeeze" || sub == "supermodes")
            cfg.squeeze.omega_max = *o.omega_max;
        if (all || sub == "envelope")
            cfg.envelope.omega_max = *o.omega_max;
        if (all || sub == "oracle")
            cfg.oracle.omega_max = *o.omega_max;
    }
    if (o.omega_points) {
        if (all || sub == "squeeze" || sub == "supermodes")
            cfg.squeeze.omega_points = *o.omega_points;
        if (all || sub == "envelope")
            cfg.envelope.omega_points = *o.omega_points;
        if (all || sub == "oracle")
            cfg.oracle.omega_points = *o.omega_points;
    }
    return cfg;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Quantum noise of parametrically driven Kerr soliton combs"};
    app.require_subcommand(1);
    Overrides o;
    std::string figure;
    bool list = false;

    const std::vector<std::pair<std::string, std::string>> help{
        {"steady", "find and label the classical steady state at [point]"},
        {"sweep", "phase diagram over the [sweep] grid"},
        {"squeeze", "squeezing spectrum, matrices and supermodes at [point]"},
        {"supermodes", "k most squeezed supermodes across the omega grid"},
        {"envelope", "intracavity photon-number noise envelope"},
        {"oracle", "closed-form below-threshold OPA spectrum"},
    };
    for (const auto &[name, desc] : help)
        add_common(app.add_subcommand(name, desc), o);
    CLI::App *fig = app.add_subcommand("reproduce-figure", "regenerate a figure's data with preset parameters");
    add_common(fig, o);
    std::string names;
    for (const auto &f : pdcs::figure_presets())
        names += (names.empty() ? "" : ", ") + f.first;
    fig->add_option("figure", figure, "one of " + names);
    fig->add_flag("--list", list, "print the presets and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "reproduce-figure" && list) {
        for (const auto &[name, desc] : pdcs::figure_presets())
            std::cout << name << "  " << desc << "\n";
        return 0;
    }
    try {
        if (sub == "reproduce-figure" && figure.empty())
            throw pdcs::ValidationError("reproduce-figure needs a figure name (" + names + ")");
        const pdcs::RunConfig cfg = build_config(sub, o);
        pdcs::run(sub, cfg, figure);
        std::cout << "wrote " << cfg.out_dir << "/manifest.json\n";
        return 0;
    } catch (const pdcs::ValidationError &e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const pdcs::NumericalError &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
