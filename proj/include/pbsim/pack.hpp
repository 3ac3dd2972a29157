#pragma once

// Two OCV-R cells connected in parallel.
//
// Units throughout the library: hours, ampere-hours, amperes, volts, ohms.
// Sign convention: applied current is negative on charge and positive on
// discharge. A branch current I_i > 0 discharges cell i (dz_i/dt = -I_i / Q_i).

#include "pbsim/ocv.hpp"

namespace pbsim {

// Simulated SOCs may stray this far outside [0, 1] (integrator roundoff)
// before a run is aborted. Within the band, OCV lookups use the clamped SOC.
inline constexpr double kSocTolerance = 1e-9;

enum class CellId { a, b };

struct CellParams {
    CellParams(double capacity_ah, double resistance_ohm, OcvModel ocv);

    double capacity_ah;
    double resistance_ohm;
    OcvModel ocv;
};

class PackParams {
public:
    // Both cells must share the same OCV model (identical-OCV assumption).
    PackParams(CellParams cell_a, CellParams cell_b);

    const CellParams& cell_a() const noexcept { return a_; }
    const CellParams& cell_b() const noexcept { return b_; }
    const CellParams& cell(CellId id) const noexcept { return id == CellId::a ? a_ : b_; }
    const OcvModel& ocv() const noexcept { return a_.ocv; }

    double total_resistance() const noexcept { return a_.resistance_ohm + b_.resistance_ohm; }
    double delta_r() const noexcept { return a_.resistance_ohm - b_.resistance_ohm; }
    double capacity_ratio() const noexcept { return a_.capacity_ah / b_.capacity_ah; }    // q
    double resistance_ratio() const noexcept { return a_.resistance_ohm / b_.resistance_ohm; }  // r

    // Same pack with the roles of a and b exchanged.
    PackParams swapped() const { return PackParams(b_, a_); }

private:
    CellParams a_;
    CellParams b_;
};

struct PackState {
    double t_h = 0.0;
    double z_a = 0.0;
    double z_b = 0.0;

    double delta_z() const noexcept { return z_a - z_b; }
    double soc(CellId id) const noexcept { return id == CellId::a ? z_a : z_b; }
};

struct BranchSolution {
    double i_a;
    double i_b;
    double v_t;

    double total() const noexcept { return i_a + i_b; }
    double delta_i() const noexcept { return i_a - i_b; }
};

// Throws DomainError if either SOC is outside [0, 1] by more than kSocTolerance.
void check_soc(const PackState& state);

// Galvanostatic circuit solve: KVL with a common terminal voltage and KCL
// i_a + i_b = applied_current.
BranchSolution solve_branches_cc(const PackParams& params, const PackState& state,
                                 double applied_current);

// Potentiostatic circuit solve: terminal voltage pinned to the setpoint,
// I_i = (U(z_i) - setpoint) / R_i.
BranchSolution solve_branches_cv(const PackParams& params, const PackState& state,
                                 double setpoint_voltage);

struct CurrentDecomposition {
    double rebalance_a;
    double ohmic_a;
    double rebalance_b;
    double ohmic_b;
};

// Split of each branch current into the SOC-rebalancing part alpha*dz/R_total
// and the resistive divider part. Affine OCV only.
CurrentDecomposition decompose_current(const PackParams& params, const PackState& state,
                                       double applied_current);

}  // namespace pbsim
