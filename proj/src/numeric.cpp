#include "pbsim/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "pbsim/errors.hpp"
#include "pbsim/format.hpp"

namespace pbsim {

void IntegratorConfig::validate() const {
    if (!(dt_h > 0.0) || !std::isfinite(dt_h)) {
        throw DomainError("integrator dt must be positive, got " + format_double(dt_h));
    }
    if (!(voltage_tolerance > 0.0) || !std::isfinite(voltage_tolerance)) {
        throw DomainError("integrator voltage tolerance must be positive");
    }
    if (max_steps == 0) {
        throw DomainError("integrator max_steps must be positive");
    }
}

namespace {

void check_range(const PackState& s) {
    for (double z : {s.z_a, s.z_b}) {
        if (!(z >= -kSocTolerance && z <= 1.0 + kSocTolerance)) {
            throw SocRangeError("SOC " + format_double(z) + " left [0, 1] at t = " +
                                    format_double(s.t_h) + " h",
                                s.t_h);
        }
    }
}

PackState euler_update(const PackParams& params, const PackState& state,
                       const BranchSolution& branches, double dt_h) {
    PackState next{};
    next.t_h = state.t_h + dt_h;
    next.z_a = state.z_a - dt_h * branches.i_a / params.cell_a().capacity_ah;
    next.z_b = state.z_b - dt_h * branches.i_b / params.cell_b().capacity_ah;
    check_range(next);
    return next;
}

void require_dt(double dt_h) {
    if (!(dt_h > 0.0)) {
        throw DomainError("step size must be positive, got " + format_double(dt_h));
    }
}

PackState lerp(const PackState& a, const PackState& b, double theta) {
    return {a.t_h + theta * (b.t_h - a.t_h), a.z_a + theta * (b.z_a - a.z_a),
            a.z_b + theta * (b.z_b - a.z_b)};
}

enum class Keep { near, far, either };

struct Event {
    std::function<double(const PackState&)> g;
    double pre_sign;  // sign of g before the event; g * pre_sign <= 0 means reached
    double tolerance;
    Keep keep;

    bool reached(double value) const { return value * pre_sign <= 0.0; }
};

// Regula falsi (Illinois variant) on the fraction of the crossing step.
PackState refine_crossing(const PackState& before, const PackState& after, double g_before,
                          double g_after, const Event& ev) {
    double lo = 0.0;
    double hi = 1.0;
    double g_lo = g_before;
    double g_hi = g_after;
    int last_side = 0;

    auto accept = [&](double value) {
        if (value == 0.0) {
            return true;
        }
        if (std::abs(value) > ev.tolerance) {
            return false;
        }
        switch (ev.keep) {
            case Keep::near: return !ev.reached(value);
            case Keep::far: return ev.reached(value);
            case Keep::either: return true;
        }
        return true;
    };
    if (g_after == 0.0 || (accept(g_after) && ev.keep != Keep::near)) {
        return after;
    }

    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
        double theta = lo + (hi - lo) * g_lo / (g_lo - g_hi);
        if (!(theta > lo && theta < hi)) {
            theta = 0.5 * (lo + hi);
        }
        const PackState trial = lerp(before, after, theta);
        const double g = ev.g(trial);
        if (accept(g)) {
            return trial;
        }
        if (ev.reached(g)) {
            hi = theta;
            g_hi = g;
            if (last_side == +1) {
                g_lo *= 0.5;
            }
            last_side = +1;
        } else {
            lo = theta;
            g_lo = g;
            if (last_side == -1) {
                g_hi *= 0.5;
            }
            last_side = -1;
        }
    }
    return lerp(before, after, ev.keep == Keep::far ? hi : lo);
}

using Stepper = std::function<PackState(const PackState&, double)>;
using Recorder = std::function<Record(const PackState&)>;

TimeSeries integrate_until(const PackState& initial, const Stepper& step, const Recorder& record,
                           const Event& ev, const IntegratorConfig& config) {
    config.validate();
    check_range(initial);

    TimeSeries series;
    series.records.push_back(record(initial));
    PackState state = initial;
    double g_state = ev.g(state);
    if (ev.reached(g_state)) {
        return series;
    }
    for (std::size_t n = 0;; ++n) {
        if (n >= config.max_steps) {
            throw NonTerminationError("termination event not reached within " +
                                      std::to_string(config.max_steps) + " steps (t = " +
                                      format_double(state.t_h) + " h)");
        }
        const PackState next = step(state, config.dt_h);
        const double g_next = ev.g(next);
        if (!ev.reached(g_next)) {
            state = next;
            g_state = g_next;
            series.records.push_back(record(state));
            continue;
        }
        const PackState end = refine_crossing(state, next, g_state, g_next, ev);
        check_range(end);
        if (end.t_h > state.t_h) {
            series.records.push_back(record(end));
        }
        return series;
    }
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

PackState step_cc(const PackParams& params, const PackState& state, double applied_current,
                  double dt_h) {
    require_dt(dt_h);
    return euler_update(params, state, solve_branches_cc(params, state, applied_current), dt_h);
}

PackState step_cv(const PackParams& params, const PackState& state, double setpoint_voltage,
                  double dt_h) {
    require_dt(dt_h);
    return euler_update(params, state, solve_branches_cv(params, state, setpoint_voltage), dt_h);
}

TimeSeries run_cc_until(const PackParams& params, const PackState& state, double applied_current,
                        const Termination& termination, const IntegratorConfig& config) {
    const Stepper step = [&](const PackState& s, double dt) {
        return step_cc(params, s, applied_current, dt);
    };
    const Recorder record = [&](const PackState& s) {
        const auto b = solve_branches_cc(params, s, applied_current);
        return Record{s.t_h, s.z_a, s.z_b, b.i_a, b.i_b, b.v_t, applied_current, Mode::cc};
    };

    Event ev = std::visit(
        [&](const auto& t) -> Event {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, VoltageReached>) {
                auto g = [&params, applied_current, target = t.volts](const PackState& s) {
                    return solve_branches_cc(params, s, applied_current).v_t - target;
                };
                // Charging runs up to the limit, discharging down to it.
                const double pre = applied_current < 0.0 ? -1.0 : applied_current > 0.0 ? 1.0 : 0.0;
                return {g, pre, config.voltage_tolerance, Keep::near};
            } else if constexpr (std::is_same_v<T, TimeElapsed>) {
                if (!(t.hours >= 0.0)) {
                    throw DomainError("elapsed-time termination must be non-negative");
                }
                auto g = [end = state.t_h + t.hours](const PackState& s) { return s.t_h - end; };
                return {g, -1.0, 1e-12, Keep::either};
            } else {
                if (!(t.soc >= 0.0 && t.soc <= 1.0)) {
                    throw DomainError("SOC termination target must be in [0, 1]");
                }
                auto g = [cell = t.cell, target = t.soc](const PackState& s) {
                    return s.soc(cell) - target;
                };
                return {g, 0.0, 1e-12, Keep::either};
            }
        },
        termination);
    if (ev.pre_sign == 0.0) {
        ev.pre_sign = sign_of(ev.g(state));
    }
    return integrate_until(state, step, record, ev, config);
}

TimeSeries run_cv_until(const PackParams& params, const PackState& state, double setpoint_voltage,
                        double cutoff_current_abs, const IntegratorConfig& config) {
    if (!(cutoff_current_abs > 0.0)) {
        throw DomainError("CV cutoff current must be positive, got " +
                          format_double(cutoff_current_abs));
    }
    const Stepper step = [&](const PackState& s, double dt) {
        return step_cv(params, s, setpoint_voltage, dt);
    };
    const Recorder record = [&](const PackState& s) {
        const auto b = solve_branches_cv(params, s, setpoint_voltage);
        return Record{s.t_h, s.z_a, s.z_b, b.i_a, b.i_b, b.v_t, b.total(), Mode::cv};
    };
    auto g = [&params, setpoint_voltage, cutoff_current_abs](const PackState& s) {
        return std::abs(solve_branches_cv(params, s, setpoint_voltage).total()) - cutoff_current_abs;
    };
    const Event ev{g, 1.0, std::max(1e-12, 1e-9 * cutoff_current_abs), Keep::far};
    return integrate_until(state, step, record, ev, config);
}

Record sample_at(const TimeSeries& series, double t_h) {
    if (series.empty()) {
        throw DomainError("cannot sample an empty series");
    }
    const auto& recs = series.records;
    if (t_h < recs.front().t_h || t_h > recs.back().t_h) {
        throw DomainError("sample time " + format_double(t_h) + " h is outside the series");
    }
    auto it = std::upper_bound(recs.begin(), recs.end(), t_h,
                               [](double t, const Record& r) { return t < r.t_h; });
    const Record& prev = *(it - 1);
    if (prev.t_h == t_h || it == recs.end()) {
        return prev;
    }
    const Record& next = *it;
    const double w = (t_h - prev.t_h) / (next.t_h - prev.t_h);
    auto mix = [w](double a, double b) { return a + w * (b - a); };
    Record r = prev;
    r.t_h = t_h;
    r.z_a = mix(prev.z_a, next.z_a);
    r.z_b = mix(prev.z_b, next.z_b);
    r.i_a = mix(prev.i_a, next.i_a);
    r.i_b = mix(prev.i_b, next.i_b);
    r.v_t = mix(prev.v_t, next.v_t);
    r.applied_i = mix(prev.applied_i, next.applied_i);
    return r;
}

}  // namespace pbsim
