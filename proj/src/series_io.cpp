#include "pbsim/series_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

#include "pbsim/format.hpp"

namespace pbsim {

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";
    }
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string_view to_string(Mode mode) { return mode == Mode::cc ? "CC" : "CV"; }

void write_series_csv(std::ostream& out, const TimeSeries& series) {
    out << kSeriesCsvHeader << '\n';
    for (const auto& r : series.records) {
        out << format_double(r.t_h) << ',' << to_string(r.mode) << ',' << format_double(r.z_a) << ','
            << format_double(r.z_b) << ',' << format_double(r.i_a) << ',' << format_double(r.i_b)
            << ',' << format_double(r.v_t) << ',' << format_double(r.applied_i) << ','
            << format_double(r.delta_z()) << ',' << format_double(r.delta_i()) << '\n';
    }
}

nlohmann::json series_to_json(const TimeSeries& series) {
    auto records = nlohmann::json::array();
    for (const auto& r : series.records) {
        records.push_back({{"t", r.t_h},
                           {"mode", to_string(r.mode)},
                           {"z_a", r.z_a},
                           {"z_b", r.z_b},
                           {"i_a", r.i_a},
                           {"i_b", r.i_b},
                           {"v_t", r.v_t},
                           {"i_total", r.applied_i},
                           {"dz", r.delta_z()},
                           {"di", r.delta_i()}});
    }
    return {{"units", {{"t", "h"}, {"z", "SOC"}, {"i", "A"}, {"v", "V"}}}, {"records", records}};
}

}  // namespace pbsim
