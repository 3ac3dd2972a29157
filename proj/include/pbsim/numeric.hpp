#pragma once

// Fixed-step explicit Euler integration of the two-cell SOC dynamics
// dz_i/dt = -I_i / Q_i, for any OCV model, in constant-current (CC) and
// constant-voltage (CV) mode.
//
// Runs stop on a termination event. The step that crosses the event is
// shortened by linear interpolation of the state inside that step (for Euler
// this is the same as taking a fractional step), repeated as regula falsi
// until the event quantity is within tolerance.

#include <cstddef>
#include <variant>
#include <vector>

#include "pbsim/pack.hpp"

namespace pbsim {

struct IntegratorConfig {
    double dt_h = 1e-3;
    double voltage_tolerance = 1e-6;  // volts
    std::size_t max_steps = 10'000'000;

    // Throws DomainError unless every field is positive.
    void validate() const;
};

enum class Mode { cc, cv };

struct Record {
    double t_h;
    double z_a;
    double z_b;
    double i_a;
    double i_b;
    double v_t;
    double applied_i;  // the CC setpoint, or i_a + i_b in CV mode
    Mode mode;
    std::size_t step = 0;  // protocol step that produced this record

    double delta_z() const noexcept { return z_a - z_b; }
    double delta_i() const noexcept { return i_a - i_b; }
    PackState state() const noexcept { return {t_h, z_a, z_b}; }
};

// Ordered simulation output. Within one run t is strictly increasing; a
// protocol repeats the boundary state as the first record of the next step.
struct TimeSeries {
    std::vector<Record> records;

    bool empty() const noexcept { return records.empty(); }
    std::size_t size() const noexcept { return records.size(); }
    const Record& front() const { return records.front(); }
    const Record& back() const { return records.back(); }
};

PackState step_cc(const PackParams& params, const PackState& state, double applied_current,
                  double dt_h);
PackState step_cv(const PackParams& params, const PackState& state, double setpoint_voltage,
                  double dt_h);

struct VoltageReached {
    double volts;
};
struct TimeElapsed {
    double hours;
};
struct SocReached {
    CellId cell;
    double soc;
};
using Termination = std::variant<VoltageReached, TimeElapsed, SocReached>;

// Integrates CC mode until the termination quantity reaches its target. The
// first record is the initial state. A voltage target is an upper limit when
// charging and a lower limit when discharging (a crossing in either direction
// at zero current); a run starting beyond it returns just the entry record.
// A voltage run ends on the near side of the target, within voltage_tolerance.
TimeSeries run_cc_until(const PackParams& params, const PackState& state, double applied_current,
                        const Termination& termination, const IntegratorConfig& config);

// Integrates CV mode until |i_a + i_b| drops to cutoff_current_abs. Returns
// just the entry record if the current is already at or below the cutoff.
TimeSeries run_cv_until(const PackParams& params, const PackState& state, double setpoint_voltage,
                        double cutoff_current_abs, const IntegratorConfig& config);

// Linear interpolation of a series at time t (t within the series' span).
// At a repeated boundary time the later record wins.
Record sample_at(const TimeSeries& series, double t_h);

}  // namespace pbsim
