#include <catch_amalgamated.hpp>

#include <cmath>

#include "pbsim/analytic.hpp"
#include "pbsim/errors.hpp"
#include "pbsim/numeric.hpp"
#include "support.hpp"

using namespace pbsim;
using Catch::Approx;
using testing::affine_pack;

namespace {

IntegratorConfig with_dt(double dt) {
    IntegratorConfig c;
    c.dt_h = dt;
    c.voltage_tolerance = 1e-10;
    return c;
}

double max_dz_error(const TimeSeries& ts, const GalvanostaticSolution& sol) {
    double worst = 0.0;
    for (const auto& r : ts.records) {
        worst = std::max(worst, std::abs(r.delta_z() - dz_of_t(sol, r.t_h)));
    }
    return worst;
}

}  // namespace

TEST_CASE("Euler step conserves charge and obeys KCL", "[numeric]") {
    const OcvModel table = load_tabulated_ocv(testing::nmc_table_path());
    for (const OcvModel& ocv : {testing::standard_affine(), table}) {
        const auto p = affine_pack(5.0, 0.05, 5.6, 0.033, ocv);
        PackState s{0.0, 0.2, 0.3};
        for (int k = 0; k < 1000; ++k) {
            const auto next = step_cc(p, s, -1.67, 1e-3);
            const double dq = 5.0 * (next.z_a - s.z_a) + 5.6 * (next.z_b - s.z_b);
            CHECK(std::abs(dq - 1.67e-3) < 1e-12);
            CHECK(std::abs(solve_branches_cc(p, next, -1.67).total() + 1.67) < 1e-12);
            CHECK(next.t_h == Approx(s.t_h + 1e-3).epsilon(1e-15));
            s = next;
        }
    }
}

TEST_CASE("time termination lands exactly on the horizon", "[numeric]") {
    const auto p = testing::reference_pack();
    const auto ts = run_cc_until(p, {0.0, 0.4, 0.45}, -1.67, TimeElapsed{0.12345}, with_dt(1e-3));
    CHECK(ts.front().t_h == 0.0);
    CHECK(ts.back().t_h == Approx(0.12345).margin(1e-12));
    for (std::size_t k = 1; k < ts.size(); ++k) {
        CHECK(ts.records[k].t_h > ts.records[k - 1].t_h);
        CHECK(ts.records[k].mode == Mode::cc);
        CHECK(ts.records[k].applied_i == -1.67);
    }
}

TEST_CASE("voltage termination stops on the near side within tolerance", "[numeric]") {
    const auto p = testing::reference_pack();
    auto cfg = with_dt(1e-2);
    cfg.voltage_tolerance = 1e-7;
    const auto charge = run_cc_until(p, {0.0, 0.5, 0.5}, -1.67, VoltageReached{4.0}, cfg);
    CHECK(charge.back().v_t <= 4.0);
    CHECK(4.0 - charge.back().v_t <= 1e-7);
    for (const auto& r : charge.records) {
        CHECK(r.v_t <= 4.0);
    }
    const auto discharge = run_cc_until(p, {0.0, 0.5, 0.5}, 1.67, VoltageReached{3.3}, cfg);
    CHECK(discharge.back().v_t >= 3.3);
    CHECK(discharge.back().v_t - 3.3 <= 1e-7);
}

TEST_CASE("SOC termination hits the requested cell SOC", "[numeric]") {
    const auto p = testing::reference_pack();
    const auto ts = run_cc_until(p, {0.0, 0.5, 0.5}, -3.0, SocReached{CellId::b, 0.8}, with_dt(1e-3));
    CHECK(ts.back().z_b == Approx(0.8).margin(1e-12));
    CHECK(ts.records[ts.size() - 2].z_b < 0.8);
}

TEST_CASE("a run whose event already holds returns the entry record", "[numeric]") {
    const auto p = testing::reference_pack();
    const auto ts = run_cc_until(p, {0.0, 0.99, 0.99}, -1.0, VoltageReached{3.5}, with_dt(1e-3));
    REQUIRE(ts.size() == 1);
    CHECK(ts.front().z_a == 0.99);
}

TEST_CASE("Euler converges to the closed form at first order", "[numeric][oracle]") {
    const auto p = affine_pack(4.0, 0.035, 5.0, 0.025);
    const PackState init{0.0, 0.30, 0.33};
    const auto sol = galvanostatic_solution(p, init.delta_z(), -2.0);
    const double horizon = 3.0 * sol.tau_h;
    const double e1 = max_dz_error(run_cc_until(p, init, -2.0, TimeElapsed{horizon}, with_dt(1e-3)), sol);
    const double e2 = max_dz_error(run_cc_until(p, init, -2.0, TimeElapsed{horizon}, with_dt(5e-4)), sol);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == Approx(2.0).margin(0.2));
}

TEST_CASE("CV run follows the per-cell exponential relaxation", "[numeric][oracle]") {
    const auto p = testing::reference_pack();
    const PackState entry{1.5, 0.92, 0.94};
    const auto ts = run_cv_until(p, entry, 4.2, 0.083, with_dt(1e-4));
    const auto psol = potentiostatic_solution(p, 4.2, entry);
    for (const auto& r : ts.records) {
        const double t = r.t_h - entry.t_h;
        CHECK(r.z_a == Approx(potentiostatic_z_of_t(psol, CellId::a, t)).margin(1e-5));
        CHECK(r.z_b == Approx(potentiostatic_z_of_t(psol, CellId::b, t)).margin(1e-5));
        CHECK(r.v_t == 4.2);
        CHECK(r.mode == Mode::cv);
        CHECK(r.applied_i == r.i_a + r.i_b);
    }
    CHECK(std::abs(ts.back().applied_i) <= 0.083);
    CHECK(std::abs(ts.back().applied_i) == Approx(0.083).margin(1e-9));
    CHECK(std::abs(ts.records[ts.size() - 2].applied_i) > 0.083);
}

TEST_CASE("CV run below the cutoff returns only the entry", "[numeric]") {
    const auto p = testing::reference_pack();
    const auto ts = run_cv_until(p, {0.0, 0.999, 0.999}, 4.2, 0.083, with_dt(1e-4));
    CHECK(ts.size() == 1);
    CHECK_THROWS_AS(run_cv_until(p, {0.0, 0.9, 0.9}, 4.2, 0.0, with_dt(1e-4)), DomainError);
}

TEST_CASE("leaving the SOC window is a range error", "[numeric]") {
    const auto p = testing::reference_pack();
    try {
        run_cc_until(p, {0.0, 0.05, 0.05}, 5.0, TimeElapsed{2.0}, with_dt(1e-3));
        FAIL("expected SocRangeError");
    } catch (const SocRangeError& e) {
        CHECK(e.time_h() > 0.0);
        CHECK(e.time_h() < 0.2);
    }
}

TEST_CASE("runs that never terminate are cut off", "[numeric]") {
    const auto p = testing::reference_pack();
    auto cfg = with_dt(1e-3);
    cfg.max_steps = 100;
    CHECK_THROWS_AS(run_cc_until(p, {0.0, 0.5, 0.5}, 0.0, VoltageReached{4.0}, cfg), NonTerminationError);
}

TEST_CASE("integrator settings are validated", "[numeric]") {
    IntegratorConfig c;
    c.dt_h = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.dt_h = 1e-3;
    c.voltage_tolerance = -1.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.voltage_tolerance = 1e-6;
    c.max_steps = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("series sampling interpolates and prefers later duplicates", "[numeric]") {
    TimeSeries ts;
    ts.records.push_back({0.0, 0.1, 0.2, 1.0, 2.0, 3.5, 3.0, Mode::cc, 0});
    ts.records.push_back({1.0, 0.3, 0.4, 3.0, 4.0, 3.7, 3.0, Mode::cc, 0});
    ts.records.push_back({1.0, 0.3, 0.4, 5.0, 6.0, 3.9, 11.0, Mode::cv, 1});
    ts.records.push_back({2.0, 0.5, 0.6, 7.0, 8.0, 4.1, 15.0, Mode::cv, 1});
    const auto mid = sample_at(ts, 0.5);
    CHECK(mid.z_a == Approx(0.2));
    CHECK(mid.i_b == Approx(3.0));
    const auto edge = sample_at(ts, 1.0);
    CHECK(edge.mode == Mode::cv);
    CHECK(edge.i_a == 5.0);
    CHECK(sample_at(ts, 2.0).z_b == 0.6);
    CHECK_THROWS_AS(sample_at(ts, 2.5), DomainError);
}
