#include "pbsim/pack.hpp"

#include <algorithm>
#include <cmath>

#include "pbsim/errors.hpp"
#include "pbsim/format.hpp"

namespace pbsim {

namespace {

double ocv_at(const OcvModel& ocv, double z) {
    // Accept roundoff-sized excursions; anything larger reaches the model and throws.
    if (z < 0.0 && z >= -kSocTolerance) {
        z = 0.0;
    } else if (z > 1.0 && z <= 1.0 + kSocTolerance) {
        z = 1.0;
    }
    return ocv.evaluate(z);
}

}  // namespace

CellParams::CellParams(double capacity, double resistance, OcvModel model)
    : capacity_ah(capacity), resistance_ohm(resistance), ocv(std::move(model)) {
    if (!(capacity > 0.0) || !std::isfinite(capacity)) {
        throw DomainError("cell capacity must be positive, got " + format_double(capacity));
    }
    if (!(resistance > 0.0) || !std::isfinite(resistance)) {
        throw DomainError("cell resistance must be positive, got " + format_double(resistance));
    }
}

PackParams::PackParams(CellParams cell_a, CellParams cell_b)
    : a_(std::move(cell_a)), b_(std::move(cell_b)) {
    if (!(a_.ocv == b_.ocv)) {
        throw DomainError("both cells must use the same OCV model");
    }
}

void check_soc(const PackState& state) {
    for (double z : {state.z_a, state.z_b}) {
        if (!(z >= -kSocTolerance && z <= 1.0 + kSocTolerance)) {
            throw DomainError("SOC " + format_double(z) + " is outside [0, 1] at t = " +
                              format_double(state.t_h) + " h");
        }
    }
}

BranchSolution solve_branches_cc(const PackParams& params, const PackState& state,
                                 double applied_current) {
    check_soc(state);
    const double ra = params.cell_a().resistance_ohm;
    const double rb = params.cell_b().resistance_ohm;
    const double total_r = params.total_resistance();
    const double ua = ocv_at(params.ocv(), state.z_a);
    const double ub = ocv_at(params.ocv(), state.z_b);

    BranchSolution s{};
    s.i_a = (ua - ub + rb * applied_current) / total_r;
    s.i_b = (ub - ua + ra * applied_current) / total_r;
    s.v_t = (rb * ua + ra * ub - ra * rb * applied_current) / total_r;
    return s;
}

BranchSolution solve_branches_cv(const PackParams& params, const PackState& state,
                                 double setpoint_voltage) {
    check_soc(state);
    BranchSolution s{};
    s.i_a = (ocv_at(params.ocv(), state.z_a) - setpoint_voltage) / params.cell_a().resistance_ohm;
    s.i_b = (ocv_at(params.ocv(), state.z_b) - setpoint_voltage) / params.cell_b().resistance_ohm;
    s.v_t = setpoint_voltage;
    return s;
}

CurrentDecomposition decompose_current(const PackParams& params, const PackState& state,
                                       double applied_current) {
    const AffineOcv* affine = params.ocv().as_affine();
    if (affine == nullptr) {
        throw UnsupportedModelError("current decomposition requires an affine OCV, got '" +
                                    std::string(params.ocv().kind()) + "'");
    }
    check_soc(state);
    const double total_r = params.total_resistance();
    const double rebalance = affine->alpha() * state.delta_z() / total_r;

    CurrentDecomposition d{};
    d.rebalance_a = rebalance;
    d.ohmic_a = params.cell_b().resistance_ohm / total_r * applied_current;
    d.rebalance_b = -rebalance;
    d.ohmic_b = params.cell_a().resistance_ohm / total_r * applied_current;
    return d;
}

}  // namespace pbsim
