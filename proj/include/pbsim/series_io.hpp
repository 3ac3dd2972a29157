#pragma once

#include <iosfwd>
#include <string_view>

#include "json.hpp"
#include "pbsim/numeric.hpp"

namespace pbsim {

// Column order of the time-series CSV.
inline constexpr std::string_view kSeriesCsvHeader = "t,mode,z_a,z_b,i_a,i_b,v_t,i_total,dz,di";

std::string_view to_string(Mode mode);

void write_series_csv(std::ostream& out, const TimeSeries& series);
nlohmann::json series_to_json(const TimeSeries& series);

}  // namespace pbsim
