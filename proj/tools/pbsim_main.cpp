// pbsim: command-line front end for the parallel-cell imbalance simulator.

#include <iostream>

#include "CLI11.hpp"
#include "pbsim/commands.hpp"

int main(int argc, char** argv) {
    using namespace pbsim::cli;

    CLI::App app{"Two parallel-connected cells: SOC and current imbalance simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    std::string out_dir;
    app.add_option("--config", common.config, "Run configuration file");
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_flag("--json", common.json, "Machine-readable output on stdout");
    app.add_option("--jobs", common.jobs, "Worker threads for sweeps (0 = all cores)");

    auto* simulate = app.add_subcommand("simulate", "Run the configured protocol");
    auto* sweep = app.add_subcommand("sweep", "Evaluate the configured (q, r) grid");
    auto* compare = app.add_subcommand("compare", "Overlay OCV variants of one scenario");

    SteadyStateOptions ss;
    auto* steady = app.add_subcommand("steady-state", "Closed-form steady-state imbalance");
    steady->add_option("--qa", ss.qa, "Capacity of cell a [Ah]")->required();
    steady->add_option("--ra", ss.ra, "Resistance of cell a [ohm]")->required();
    steady->add_option("--qb", ss.qb, "Capacity of cell b [Ah]")->required();
    steady->add_option("--rb", ss.rb, "Resistance of cell b [ohm]")->required();
    steady->add_option("--alpha", ss.alpha, "OCV slope [V]")->capture_default_str();
    steady->add_option("--u0", ss.u0, "OCV at zero SOC [V]")->capture_default_str();
    steady->add_option("--current", ss.current, "Applied current [A], negative charges")->required();
    steady->add_option("--z-min", ss.z_min, "Lower SOC of the cycle window")->capture_default_str();
    steady->add_option("--z-max", ss.z_max, "Upper SOC of the cycle window")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    if (!out_dir.empty()) {
        common.out_dir = out_dir;
    }

    if (steady->parsed()) {
        ss.json = common.json;
        return cmd_steady_state(ss, std::cout, std::cerr);
    }
    if (common.config.empty()) {
        std::cerr << "usage error: --config is required for this command\n";
        return kConfigError;
    }
    if (simulate->parsed()) {
        return cmd_simulate(common, std::cout, std::cerr);
    }
    if (sweep->parsed()) {
        return cmd_sweep(common, std::cout, std::cerr);
    }
    return cmd_compare(common, std::cout, std::cerr);
}
