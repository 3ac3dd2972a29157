#pragma once

// Declarative run configuration. A config file is a JSON document with the
// sections `pack`, `ocv`, `initial_state`, `protocol`, `integrator`,
// `output`, and optionally `sweep` and `compare`. See configs/README.md for
// the schema. Table paths are resolved relative to the config file.
//
// Loading validates every value and reports failures as ConfigError with the
// dotted path of the field, e.g. `pack.cell_a.resistance_ohm`.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbsim/protocol.hpp"
#include "pbsim/sweep.hpp"

namespace pbsim {

struct OcvConfig {
    enum class Kind { affine, piecewise, table, table_fit };

    Kind kind = Kind::affine;
    double u0 = 3.0;
    double alpha = 1.2;
    std::vector<OcvPoint> breakpoints;  // piecewise
    std::filesystem::path table;        // table, table_fit (as written in the file)
    int segments = 4;                   // table_fit
};

struct CellConfig {
    double capacity_ah = 0.0;
    double resistance_ohm = 0.0;
};

struct AxisConfig {
    double min = 0.5;
    double max = 2.0;
    std::size_t points = 41;
    AxisSpacing spacing = AxisSpacing::log;
    std::vector<double> values;  // overrides the range when non-empty
};

struct SweepConfig {
    AxisConfig q;
    AxisConfig r;
    double current = -1.67;
    bool simulate = false;
    SimulateToVoltage simulation;
};

struct CompareVariant {
    std::string name;
    OcvConfig ocv;
};

struct CompareConfig {
    std::vector<CompareVariant> variants;
    std::size_t sample_every = 10;  // integrator steps between shared-grid samples
};

struct OutputConfig {
    std::filesystem::path dir = "out";
    std::string basename = "run";
    bool csv = true;
    bool json = true;
};

struct RunConfig {
    std::filesystem::path base_dir;  // directory of the config file
    CellConfig cell_a;
    CellConfig cell_b;
    OcvConfig ocv;
    PackState initial_state;
    std::vector<ProtocolStep> protocol;
    IntegratorConfig integrator;
    OutputConfig output;
    std::optional<SweepConfig> sweep;
    std::optional<CompareConfig> compare;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
nlohmann::json to_json(const RunConfig& config);

OcvModel build_ocv(const OcvConfig& ocv, const std::filesystem::path& base_dir);
PackParams build_pack(const RunConfig& config);
PackParams build_pack(const RunConfig& config, const OcvModel& ocv);
Protocol build_protocol(const RunConfig& config);
SweepSpec build_sweep(const RunConfig& config);

}  // namespace pbsim
