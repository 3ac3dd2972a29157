#include "pbsim/analytic.hpp"

#include <cmath>
#include <string>

#include "pbsim/errors.hpp"
#include "pbsim/format.hpp"

namespace pbsim {

namespace {

const AffineOcv& require_affine(const PackParams& params) {
    const AffineOcv* affine = params.ocv().as_affine();
    if (affine == nullptr) {
        throw UnsupportedModelError("closed-form solution requires an affine OCV, got '" +
                                    std::string(params.ocv().kind()) + "'");
    }
    return *affine;
}

void require_time(double t_h) {
    if (!(t_h >= 0.0)) {
        throw DomainError("time must be non-negative, got " + format_double(t_h));
    }
}

}  // namespace

GalvanostaticSolution galvanostatic_solution(const PackParams& params, double dz0,
                                             double applied_current) {
    const double alpha = require_affine(params).alpha();
    const double qa = params.cell_a().capacity_ah;
    const double qb = params.cell_b().capacity_ah;
    const double ra = params.cell_a().resistance_ohm;
    const double rb = params.cell_b().resistance_ohm;

    GalvanostaticSolution sol{};
    sol.tau_h = params.total_resistance() / alpha * (qa * qb / (qa + qb));
    sol.kappa = (ra * qa - rb * qb) / (alpha * (qa + qb));
    sol.dz0 = dz0;
    sol.applied_current = applied_current;
    sol.dz_ss = sol.kappa * applied_current;
    sol.di_ss = (qa - qb) / (qa + qb) * applied_current;
    return sol;
}

double dz_of_t(const GalvanostaticSolution& sol, double t_h) {
    require_time(t_h);
    const double decay = std::exp(-t_h / sol.tau_h);
    return sol.dz0 * decay - sol.kappa * (decay - 1.0) * sol.applied_current;
}

double di_of_t(const GalvanostaticSolution& sol, const PackParams& params, double t_h) {
    const double alpha = require_affine(params).alpha();
    const double total_r = params.total_resistance();
    return 2.0 * alpha / total_r * dz_of_t(sol, t_h) -
           params.delta_r() / total_r * sol.applied_current;
}

PackState galvanostatic_state(const PackParams& params, const PackState& initial,
                              double applied_current, double t_h) {
    const auto sol = galvanostatic_solution(params, initial.delta_z(), applied_current);
    const double dz = dz_of_t(sol, t_h);
    const double qa = params.cell_a().capacity_ah;
    const double qb = params.cell_b().capacity_ah;
    const double charge = qa * initial.z_a + qb * initial.z_b - applied_current * t_h;

    PackState s{};
    s.t_h = initial.t_h + t_h;
    s.z_a = (charge + qb * dz) / (qa + qb);
    s.z_b = (charge - qa * dz) / (qa + qb);
    return s;
}

SteadyState steady_state_map_point(const PackParams& params, double applied_current) {
    const auto sol = galvanostatic_solution(params, 0.0, applied_current);
    return {sol.dz_ss, sol.di_ss};
}

double crate_observability_bound(const PackParams& params, double z_min, double z_max) {
    if (!(z_min >= 0.0 && z_max <= 1.0 && z_min <= z_max)) {
        throw DomainError("SOC window must satisfy 0 <= z_min <= z_max <= 1");
    }
    const auto sol = galvanostatic_solution(params, 0.0, 0.0);
    return (z_max - z_min) / (3.0 * sol.tau_h);
}

PotentiostaticSolution potentiostatic_solution(const PackParams& params, double setpoint_voltage,
                                               const PackState& entry) {
    const AffineOcv& ocv = require_affine(params);
    check_soc(entry);
    PotentiostaticSolution p{};
    p.alpha = ocv.alpha();
    p.tau_a_h = params.cell_a().capacity_ah * params.cell_a().resistance_ohm / p.alpha;
    p.tau_b_h = params.cell_b().capacity_ah * params.cell_b().resistance_ohm / p.alpha;
    p.delta_u = setpoint_voltage - ocv.u0();
    p.z_a0 = entry.z_a;
    p.z_b0 = entry.z_b;
    return p;
}

double potentiostatic_z_of_t(const PotentiostaticSolution& psol, CellId cell, double t_h) {
    require_time(t_h);
    const double decay = std::exp(-t_h / psol.tau(cell));
    return psol.z0(cell) * decay - (decay - 1.0) * psol.delta_u / psol.alpha;
}

double potentiostatic_current(const PotentiostaticSolution& psol, const PackParams& params,
                              CellId cell, double t_h) {
    require_affine(params);
    const double z = potentiostatic_z_of_t(psol, cell, t_h);
    return (psol.alpha * z - psol.delta_u) / params.cell(cell).resistance_ohm;
}

}  // namespace pbsim
