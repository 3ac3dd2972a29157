#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pbsim/analytic.hpp"
#include "pbsim/errors.hpp"
#include "support.hpp"

using namespace pbsim;
using Catch::Approx;
using testing::affine_pack;

TEST_CASE("time constant of the worked example", "[analytic]") {
    const auto p = affine_pack(4.0, 0.035, 5.0, 0.025);
    const auto sol = galvanostatic_solution(p, 0.0, -1.67);
    CHECK(sol.tau_h == Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(3.0 * sol.tau_h == Approx(0.3333).margin(1e-4));
    CHECK(sol.eigenvalue() == Approx(-9.0));
    CHECK(crate_observability_bound(p, 0.0, 0.33) == Approx(0.99).epsilon(1e-12));
}

TEST_CASE("reference pack steady state", "[analytic]") {
    const auto p = testing::reference_pack();
    const auto sol = galvanostatic_solution(p, -0.05, -1.67);
    CHECK(sol.tau_h == Approx(0.18270).margin(1e-5));
    CHECK(sol.kappa == Approx(0.005126).margin(1e-6));
    CHECK(sol.dz_ss == Approx(-0.00856).margin(1e-5));
    CHECK(sol.di_ss == Approx(0.0945).margin(1e-4));
    CHECK(dz_of_t(sol, 0.0) == -0.05);
    CHECK(dz_of_t(sol, 50.0) == Approx(sol.dz_ss).epsilon(1e-12));
    CHECK(di_of_t(sol, p, 50.0) == Approx(sol.di_ss).epsilon(1e-12));
}

TEST_CASE("steady state at the zero-imbalance marker", "[analytic]") {
    const auto p = affine_pack(5.0, 0.05, 5.0 / 0.8, 0.05 / 1.25);
    const auto ss = steady_state_map_point(p, -1.67);
    CHECK(std::abs(ss.dz_ss) < 1e-17);
    CHECK(ss.di_ss == Approx(0.185556).margin(1e-6));
}

TEST_CASE("matched capacities give zero steady current imbalance", "[analytic][property]") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> r(0.25, 4.0);
    for (int k = 0; k < 100; ++k) {
        const auto p = affine_pack(5.0, 0.05, 5.0, 0.05 / r(rng));
        CHECK(std::abs(steady_state_map_point(p, -1.67).di_ss) < 1e-12);
    }
}

TEST_CASE("closed form satisfies its differential equation", "[analytic][property]") {
    // d(dz)/dt = -(i_a/Qa - i_b/Qb) with currents from the circuit solve.
    const auto p = affine_pack(4.2, 0.041, 5.3, 0.028);
    const PackState init{0.0, 0.30, 0.34};
    const double current = -2.1;
    const auto sol = galvanostatic_solution(p, init.delta_z(), current);
    for (double t : {0.0, 0.05, 0.2, 0.6}) {
        const double h = 1e-6;
        const double derivative = (dz_of_t(sol, t + h) - dz_of_t(sol, t > h ? t - h : t)) /
                                  (t > h ? 2 * h : h);
        const auto st = galvanostatic_state(p, init, current, t);
        const auto br = solve_branches_cc(p, st, current);
        const double rhs = -(br.i_a / 4.2 - br.i_b / 5.3);
        CHECK(derivative == Approx(rhs).margin(t > h ? 1e-8 : 1e-5));
        CHECK(di_of_t(sol, p, t) == Approx(br.delta_i()).margin(1e-12));
    }
}

TEST_CASE("per-cell state conserves charge", "[analytic]") {
    const auto p = testing::reference_pack();
    const PackState init{0.0, 0.25, 0.30};
    const auto st = galvanostatic_state(p, init, -1.67, 0.5);
    const double q0 = 5.0 * 0.25 + 5.6 * 0.30;
    CHECK(5.0 * st.z_a + 5.6 * st.z_b == Approx(q0 + 1.67 * 0.5).epsilon(1e-14));
    CHECK(st.t_h == 0.5);
}

TEST_CASE("steady-state signs follow the product test", "[analytic][property]") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ratio(0.5, 2.0);
    for (int k = 0; k < 200; ++k) {
        const double q = ratio(rng);
        const double r = ratio(rng);
        const auto p = affine_pack(5.0, 0.05, 5.0 / q, 0.05 / r);
        const auto charge = steady_state_map_point(p, -1.67);
        const auto discharge = steady_state_map_point(p, 1.67);
        const double ra_qa = 0.05 * 5.0;
        const double rb_qb = (0.05 / r) * (5.0 / q);
        CHECK((charge.dz_ss > 0) == (ra_qa < rb_qb));
        CHECK(discharge.dz_ss == Approx(-charge.dz_ss).margin(1e-18));
        CHECK(discharge.di_ss == Approx(-charge.di_ss).margin(1e-18));
        if (q < 1.0) {
            CHECK(charge.di_ss > 0.0);  // weaker cell a carries the smaller charge current
        }
    }
}

TEST_CASE("potentiostatic solution relaxes to the setpoint SOC", "[analytic]") {
    const auto p = testing::reference_pack();
    const auto psol = potentiostatic_solution(p, 4.2, {0.0, 0.93, 0.95});
    CHECK(psol.tau_a_h == Approx(0.2083).margin(1e-4));
    CHECK(psol.tau_b_h == Approx(0.154).margin(1e-4));
    CHECK(psol.asymptote() == Approx(1.0).epsilon(1e-14));
    CHECK(potentiostatic_z_of_t(psol, CellId::a, 0.0) == Approx(0.93).epsilon(1e-15));
    CHECK(potentiostatic_z_of_t(psol, CellId::b, 100.0) == Approx(1.0).epsilon(1e-12));
    const double ia = potentiostatic_current(psol, p, CellId::a, 0.0);
    CHECK(ia == Approx((1.2 * 0.93 - 1.2) / 0.05).epsilon(1e-12));
}

TEST_CASE("closed forms require an affine OCV and non-negative time", "[analytic]") {
    const OcvModel table = load_tabulated_ocv(testing::nmc_table_path());
    const auto nonlinear = affine_pack(5.0, 0.05, 5.0, 0.05, table);
    CHECK_THROWS_AS(galvanostatic_solution(nonlinear, 0.0, 1.0), UnsupportedModelError);
    CHECK_THROWS_AS(potentiostatic_solution(nonlinear, 4.2, {0.0, 0.9, 0.9}), UnsupportedModelError);
    const auto sol = galvanostatic_solution(testing::reference_pack(), 0.0, 1.0);
    CHECK_THROWS_AS(dz_of_t(sol, -1.0), DomainError);
    CHECK_THROWS_AS(crate_observability_bound(testing::reference_pack(), 0.6, 0.4), DomainError);
}
