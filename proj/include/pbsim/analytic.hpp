#pragma once

// Closed-form imbalance dynamics for two parallel cells sharing an affine OCV
// U(z) = u0 + alpha * z. Every function here throws UnsupportedModelError
// when the pack's OCV is not affine, and DomainError for negative times.
//
// Under constant current I the SOC imbalance dz = z_a - z_b is a scalar LTI
// system with a single pole at -1/tau:
//
//   dz(t)  = dz0 * e^(-t/tau) - kappa * (e^(-t/tau) - 1) * I
//   tau    = (R_total / alpha) * Qa*Qb / (Qa + Qb)            [h]
//   kappa  = (Ra*Qa - Rb*Qb) / (alpha * (Qa + Qb))             [SOC per A]
//   di(t)  = (2*alpha / R_total) * dz(t) - (dR / R_total) * I
//
// Under a constant terminal voltage Uf each cell relaxes independently toward
// z = (Uf - u0) / alpha with tau_i = Q_i * R_i / alpha.

#include "pbsim/pack.hpp"

namespace pbsim {

struct GalvanostaticSolution {
    double tau_h;
    double kappa;            // SOC per ampere
    double dz0;
    double applied_current;  // A
    double dz_ss;            // kappa * I
    double di_ss;            // A

    double eigenvalue() const noexcept { return -1.0 / tau_h; }
};

GalvanostaticSolution galvanostatic_solution(const PackParams& params, double dz0,
                                             double applied_current);

double dz_of_t(const GalvanostaticSolution& sol, double t_h);
double di_of_t(const GalvanostaticSolution& sol, const PackParams& params, double t_h);

// Per-cell SOCs under constant current, from the imbalance solution and the
// total stored charge Qa*za + Qb*zb, which falls at exactly I amperes.
PackState galvanostatic_state(const PackParams& params, const PackState& initial,
                              double applied_current, double t_h);

struct SteadyState {
    double dz_ss;
    double di_ss;
};

SteadyState steady_state_map_point(const PackParams& params, double applied_current);

// (z_max - z_min) / (3 tau): C-rates below this leave at least three time
// constants inside the SOC window, i.e. ~95% of the way to steady state.
double crate_observability_bound(const PackParams& params, double z_min, double z_max);

struct PotentiostaticSolution {
    double tau_a_h;
    double tau_b_h;
    double alpha;
    double delta_u;  // setpoint - u0
    double z_a0;
    double z_b0;

    double tau(CellId id) const noexcept { return id == CellId::a ? tau_a_h : tau_b_h; }
    double z0(CellId id) const noexcept { return id == CellId::a ? z_a0 : z_b0; }
    double asymptote() const noexcept { return delta_u / alpha; }
};

PotentiostaticSolution potentiostatic_solution(const PackParams& params, double setpoint_voltage,
                                               const PackState& entry);

double potentiostatic_z_of_t(const PotentiostaticSolution& psol, CellId cell, double t_h);
double potentiostatic_current(const PotentiostaticSolution& psol, const PackParams& params,
                              CellId cell, double t_h);

}  // namespace pbsim
