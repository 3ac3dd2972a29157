#include "pbsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "pbsim/errors.hpp"

namespace pbsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_step(const ProtocolStep& step) {
    std::visit(overloaded{
                   [](const CcStep& s) {
                       if (!std::isfinite(s.current)) {
                           throw DomainError("CC current must be finite");
                       }
                       std::visit(overloaded{
                                      [](const VoltageReached& v) {
                                          if (!(v.volts > 0.0)) {
                                              throw DomainError("CC voltage limit must be positive");
                                          }
                                      },
                                      [](const TimeElapsed& t) {
                                          if (!(t.hours >= 0.0)) {
                                              throw DomainError("CC duration must be non-negative");
                                          }
                                      },
                                      [](const SocReached& z) {
                                          if (!(z.soc >= 0.0 && z.soc <= 1.0)) {
                                              throw DomainError("CC SOC target must be in [0, 1]");
                                          }
                                      },
                                  },
                                  s.until);
                   },
                   [](const CvStep& s) {
                       if (!(s.setpoint > 0.0)) {
                           throw DomainError("CV setpoint must be positive");
                       }
                       if (!(s.cutoff_current_abs > 0.0)) {
                           throw DomainError("CV cutoff current must be positive");
                       }
                   },
                   [](const RestStep& s) {
                       if (!(s.duration_h >= 0.0)) {
                           throw DomainError("rest duration must be non-negative");
                       }
                   },
               },
               step);
}

TimeSeries run_step(const PackParams& params, const ProtocolStep& step, const PackState& state,
                    const IntegratorConfig& config) {
    return std::visit(overloaded{
                          [&](const CcStep& s) {
                              return run_cc_until(params, state, s.current, s.until, config);
                          },
                          [&](const CvStep& s) {
                              return run_cv_until(params, state, s.setpoint, s.cutoff_current_abs,
                                                  config);
                          },
                          [&](const RestStep& s) {
                              return run_cc_until(params, state, 0.0, TimeElapsed{s.duration_h},
                                                  config);
                          },
                      },
                      step);
}

}  // namespace

void Protocol::validate() const {
    if (steps.empty()) {
        throw DomainError("protocol has no steps");
    }
    check_soc(initial_state);
    for (const auto& step : steps) {
        validate_step(step);
    }
}

TimeSeries run_protocol(const PackParams& params, const Protocol& protocol,
                        const IntegratorConfig& config) {
    protocol.validate();
    TimeSeries out;
    PackState state = protocol.initial_state;
    for (std::size_t k = 0; k < protocol.steps.size(); ++k) {
        TimeSeries part;
        try {
            part = run_step(params, protocol.steps[k], state, config);
        } catch (const Error& e) {
            std::throw_with_nested(StepError("step " + std::to_string(k) + ": " + e.what(), k));
        }
        for (auto& r : part.records) {
            r.step = k;
        }
        state = part.back().state();
        out.records.insert(out.records.end(), part.records.begin(), part.records.end());
    }
    return out;
}

CycleSummary summarize_cycle(const TimeSeries& series) {
    const auto& recs = series.records;
    auto is_charge = [](const Record& r) { return r.mode == Mode::cc && r.applied_i < 0.0; };
    auto is_discharge = [](const Record& r) { return r.mode == Mode::cc && r.applied_i > 0.0; };

    // Last record belonging to the same step as *first.
    auto leg_end = [&](std::vector<Record>::const_iterator first) {
        auto it = first;
        while (std::next(it) != recs.end() && std::next(it)->step == first->step) {
            ++it;
        }
        return it;
    };

    const auto charge = std::find_if(recs.begin(), recs.end(), is_charge);
    if (charge == recs.end()) {
        throw StructureError("series has no constant-current charge leg");
    }
    const auto charge_end = leg_end(charge);

    CycleSummary s{};
    s.dz_end_of_charge = charge_end->delta_z();
    s.di_end_of_charge = charge_end->delta_i();

    const auto discharge = std::find_if(std::next(charge_end), recs.end(), is_discharge);
    if (discharge != recs.end()) {
        const auto discharge_end = leg_end(discharge);
        s.dz_end_of_discharge = discharge_end->delta_z();
        s.di_end_of_discharge = discharge_end->delta_i();
    }
    for (const auto& r : recs) {
        s.peak_abs_i_a = std::max(s.peak_abs_i_a, std::abs(r.i_a));
        s.peak_abs_i_b = std::max(s.peak_abs_i_b, std::abs(r.i_b));
    }
    return s;
}

}  // namespace pbsim
