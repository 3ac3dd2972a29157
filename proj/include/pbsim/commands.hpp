#pragma once

// Implementations of the `pbsim` subcommands. Each returns a process exit
// code and writes human-readable output to `out` and diagnostics to `err`.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pbsim/config.hpp"

namespace pbsim::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kRuntimeError = 3,
    kIoError = 4,
};

struct CommonOptions {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out_dir;  // overrides output.dir
    bool json = false;
    unsigned jobs = 1;
};

struct SteadyStateOptions {
    double qa = 0.0;
    double ra = 0.0;
    double qb = 0.0;
    double rb = 0.0;
    double alpha = 1.2;
    double u0 = 3.0;
    double current = 0.0;
    double z_min = 0.0;
    double z_max = 1.0;
    bool json = false;
};

int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_steady_state(const SteadyStateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommonOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CommonOptions& opts, std::ostream& out, std::ostream& err);

// Imbalance trajectories of several OCV variants of one scenario, resampled
// onto a shared grid t_k = k * sample_every * dt. Entries past the end of a
// variant's run are NaN.
struct ComparisonTable {
    std::vector<std::string> names;
    std::vector<double> t_h;
    std::vector<std::vector<double>> dz;  // [variant][sample]
    std::vector<std::vector<double>> di;
};

ComparisonTable compare_variants(const RunConfig& config);
void write_comparison_csv(std::ostream& out, const ComparisonTable& table);

}  // namespace pbsim::cli
