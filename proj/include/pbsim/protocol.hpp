#pragma once

// Cycling protocols: an initial pack state followed by an ordered list of
// CC, CV and rest steps, run back to back. Each step starts from the exact
// state where the previous one stopped.

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "pbsim/numeric.hpp"

namespace pbsim {

struct CcStep {
    double current;  // A, negative charges
    Termination until;
};

struct CvStep {
    double setpoint;            // V
    double cutoff_current_abs;  // A, compared against |i_a + i_b|
};

// Zero-current CC segment of fixed length.
struct RestStep {
    double duration_h;
};

using ProtocolStep = std::variant<CcStep, CvStep, RestStep>;

struct Protocol {
    std::vector<ProtocolStep> steps;
    PackState initial_state;

    // Throws DomainError on an empty protocol or a malformed step.
    void validate() const;
};

// Concatenated series of every step; records carry their step index. Any step
// failure is rethrown as StepError with the original exception nested.
TimeSeries run_protocol(const PackParams& params, const Protocol& protocol,
                        const IntegratorConfig& config);

struct CycleSummary {
    double dz_end_of_charge;
    double di_end_of_charge;
    std::optional<double> dz_end_of_discharge;
    std::optional<double> di_end_of_discharge;
    double peak_abs_i_a;
    double peak_abs_i_b;
};

// End-of-leg imbalance values. The charge leg is the first CC step with a
// negative current; the discharge leg is the first later CC step with a
// positive current. Throws StructureError if there is no charge leg.
CycleSummary summarize_cycle(const TimeSeries& series);

}  // namespace pbsim
