#pragma once

// (q, r) parameter maps, q = Qa/Qb and r = Ra/Rb. Cell a is held fixed and
// cell b is derived per grid point as Qb = Qa/q, Rb = Ra/r.

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pbsim/numeric.hpp"

namespace pbsim {

enum class AxisSpacing { linear, log };

class Axis {
public:
    // `points` values from min to max inclusive.
    static Axis range(double min, double max, std::size_t points, AxisSpacing spacing);
    // Explicit strictly increasing positive values.
    static Axis list(std::vector<double> values);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    explicit Axis(std::vector<double> values);

    std::vector<double> values_;
};

// Closed-form steady states (affine OCV).
struct AnalyticSteadyState {};

// Constant-current run from (z_a0, z_b0) until the terminal voltage reaches
// v_max; records the final imbalance.
struct SimulateToVoltage {
    double v_max = 4.2;
    double z_a0 = 0.85;
    double z_b0 = 0.90;
};

using SweepMode = std::variant<AnalyticSteadyState, SimulateToVoltage>;

struct SweepSpec {
    CellParams base_cell;
    Axis q;
    Axis r;
    double applied_current;
    SweepMode mode;
};

enum class PointStatus { ok, range_error, non_terminated };

std::string_view to_string(PointStatus status);

// Row-major over q (outer) then r (inner).
struct SweepGrid {
    std::vector<double> q;
    std::vector<double> r;
    std::vector<double> dz;
    std::vector<double> di;
    std::vector<PointStatus> status;

    std::size_t index(std::size_t iq, std::size_t ir) const noexcept { return iq * r.size() + ir; }
    double dz_at(std::size_t iq, std::size_t ir) const { return dz[index(iq, ir)]; }
    double di_at(std::size_t iq, std::size_t ir) const { return di[index(iq, ir)]; }
    PointStatus status_at(std::size_t iq, std::size_t ir) const { return status[index(iq, ir)]; }
};

// Pack for one grid point.
PackParams pack_at(const CellParams& base_cell, double q, double r);

// Evaluates every grid point, using up to `jobs` worker threads (0 picks the
// hardware concurrency). Output order does not depend on `jobs`. Failed
// simulation points are flagged, not thrown.
SweepGrid run_sweep(const SweepSpec& spec, const IntegratorConfig& config, unsigned jobs = 1);

struct QrPoint {
    double q;
    double r;
};

struct ZeroContours {
    std::vector<QrPoint> dz_zero;
    std::vector<QrPoint> di_zero;
};

// Zero-level points of dz and di: grid nodes that are exactly zero plus
// linear-interpolated sign changes along every grid edge. Non-ok points are
// skipped.
ZeroContours zero_contours(const SweepGrid& grid);

void write_grid_csv(std::ostream& out, const SweepGrid& grid);
nlohmann::json grid_to_json(const SweepGrid& grid);
void write_contours_csv(std::ostream& out, const ZeroContours& contours);

}  // namespace pbsim
