#include "pbsim/ocv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>

#include "pbsim/errors.hpp"
#include "pbsim/format.hpp"

namespace pbsim {

namespace {

void require_soc(double z) {
    if (!(z >= 0.0 && z <= 1.0)) {
        throw DomainError("SOC " + format_double(z) + " is outside [0, 1]");
    }
}

}  // namespace

AffineOcv::AffineOcv(double u0, double alpha) : u0_(u0), alpha_(alpha) {
    if (!(u0 > 0.0) || !std::isfinite(u0)) {
        throw DomainError("affine OCV: u0 must be positive, got " + format_double(u0));
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("affine OCV: alpha must be positive, got " + format_double(alpha));
    }
}

double AffineOcv::evaluate(double z) const {
    require_soc(z);
    return u0_ + alpha_ * z;
}

double AffineOcv::slope_at(double z) const {
    require_soc(z);
    return alpha_;
}

namespace detail {

MonotoneTable::MonotoneTable(std::vector<OcvPoint> points, std::string_view what)
    : points_(std::move(points)) {
    const std::string name(what);
    if (points_.size() < 2) {
        throw DomainError(name + ": need at least two points");
    }
    for (const auto& p : points_) {
        if (!std::isfinite(p.z) || !std::isfinite(p.u)) {
            throw DomainError(name + ": non-finite point");
        }
    }
    if (points_.front().z != 0.0 || points_.back().z != 1.0) {
        throw DomainError(name + ": z must start at 0 and end at 1");
    }
    for (std::size_t k = 1; k < points_.size(); ++k) {
        if (!(points_[k].z > points_[k - 1].z)) {
            throw DomainError(name + ": z not strictly increasing at index " + std::to_string(k));
        }
        if (!(points_[k].u > points_[k - 1].u)) {
            throw DomainError(name + ": u not strictly increasing at index " + std::to_string(k));
        }
    }
}

std::size_t MonotoneTable::segment_index(double z) const {
    // First knot strictly greater than z; the segment starts one before it.
    auto it = std::upper_bound(points_.begin(), points_.end(), z,
                               [](double value, const OcvPoint& p) { return value < p.z; });
    auto idx = static_cast<std::size_t>(it - points_.begin());
    if (idx == 0) {
        return 0;
    }
    return std::min(idx - 1, points_.size() - 2);
}

double MonotoneTable::evaluate(double z) const {
    require_soc(z);
    const std::size_t k = segment_index(z);
    const OcvPoint& lo = points_[k];
    const OcvPoint& hi = points_[k + 1];
    if (z == lo.z) {
        return lo.u;
    }
    if (z == hi.z) {
        return hi.u;
    }
    const double w = (z - lo.z) / (hi.z - lo.z);
    return lo.u + w * (hi.u - lo.u);
}

double MonotoneTable::slope_at(double z) const {
    require_soc(z);
    const std::size_t k = segment_index(z);
    return (points_[k + 1].u - points_[k].u) / (points_[k + 1].z - points_[k].z);
}

}  // namespace detail

PiecewiseAffineOcv::PiecewiseAffineOcv(std::vector<OcvPoint> breakpoints)
    : table_(std::move(breakpoints), "piecewise-affine OCV") {}

TabulatedOcv::TabulatedOcv(std::vector<OcvPoint> samples)
    : table_(std::move(samples), "tabulated OCV") {}

OcvModel::OcvModel(AffineOcv model) : impl_(std::make_shared<const Variant>(std::move(model))) {}
OcvModel::OcvModel(PiecewiseAffineOcv model)
    : impl_(std::make_shared<const Variant>(std::move(model))) {}
OcvModel::OcvModel(TabulatedOcv model) : impl_(std::make_shared<const Variant>(std::move(model))) {}

double OcvModel::evaluate(double z) const {
    return std::visit([z](const auto& m) { return m.evaluate(z); }, *impl_);
}

double OcvModel::slope_at(double z) const {
    return std::visit([z](const auto& m) { return m.slope_at(z); }, *impl_);
}

std::string_view OcvModel::kind() const noexcept {
    switch (impl_->index()) {
        case 0: return "affine";
        case 1: return "piecewise";
        default: return "table";
    }
}

bool OcvModel::operator==(const OcvModel& other) const {
    return same_instance(other) || *impl_ == *other.impl_;
}

PiecewiseFit fit_piecewise(const TabulatedOcv& table, int n_segments) {
    const auto samples = table.samples();
    const std::size_t n = samples.size();
    if (n_segments < 1 || static_cast<std::size_t>(n_segments) > n - 1) {
        throw DomainError("fit_piecewise: n_segments must be in [1, " + std::to_string(n - 1) +
                          "], got " + std::to_string(n_segments));
    }
    const auto segs = static_cast<std::size_t>(n_segments);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // chord_error[i * n + j]: worst deviation of samples i..j from the chord i -> j.
    std::vector<double> chord_error(n * n, inf);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double slope = (samples[j].u - samples[i].u) / (samples[j].z - samples[i].z);
            double worst = 0.0;
            for (std::size_t k = i + 1; k < j; ++k) {
                const double fit = samples[i].u + slope * (samples[k].z - samples[i].z);
                worst = std::max(worst, std::abs(samples[k].u - fit));
            }
            chord_error[i * n + j] = worst;
        }
    }

    // best[s][j]: minimax error covering samples 0..j with s segments.
    std::vector<std::vector<double>> best(segs + 1, std::vector<double>(n, inf));
    std::vector<std::vector<std::size_t>> from(segs + 1, std::vector<std::size_t>(n, 0));
    best[0][0] = 0.0;
    for (std::size_t s = 1; s <= segs; ++s) {
        for (std::size_t j = s; j < n; ++j) {
            for (std::size_t i = s - 1; i < j; ++i) {
                const double cand = std::max(best[s - 1][i], chord_error[i * n + j]);
                if (cand < best[s][j]) {
                    best[s][j] = cand;
                    from[s][j] = i;
                }
            }
        }
    }

    std::vector<std::size_t> knots{n - 1};
    for (std::size_t s = segs; s > 0; --s) {
        knots.push_back(from[s][knots.back()]);
    }
    std::reverse(knots.begin(), knots.end());

    std::vector<OcvPoint> breakpoints;
    breakpoints.reserve(knots.size());
    for (std::size_t k : knots) {
        breakpoints.push_back(samples[k]);
    }
    for (std::size_t k = 1; k < breakpoints.size(); ++k) {
        if (!(breakpoints[k].u > breakpoints[k - 1].u)) {
            throw FitError("fit_piecewise: non-monotone segment ending at z = " +
                           format_double(breakpoints[k].z));
        }
    }

    PiecewiseAffineOcv model(std::move(breakpoints));
    double max_dev = 0.0;
    for (const auto& p : samples) {
        max_dev = std::max(max_dev, std::abs(p.u - model.evaluate(p.z)));
    }
    return {std::move(model), max_dev};
}

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

bool parse_number(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) {
        return false;
    }
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

}  // namespace

TabulatedOcv parse_tabulated_ocv(std::istream& in, std::string_view source_name) {
    const std::string source(source_name);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw FormatError(source + ": empty OCV table");
    }
    ++line_no;
    if (trim(line) != "z,u") {
        throw FormatError(source + ":1: expected header 'z,u'");
    }

    std::vector<OcvPoint> points;
    bool seen_blank = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) {
            seen_blank = true;
            continue;
        }
        const auto where = source + ":" + std::to_string(line_no) + ": ";
        if (seen_blank) {
            throw FormatError(where + "data after blank line");
        }
        const auto comma = text.find(',');
        OcvPoint p{};
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos ||
            !parse_number(text.substr(0, comma), p.z) || !parse_number(text.substr(comma + 1), p.u)) {
            throw FormatError(where + "expected two comma-separated numbers");
        }
        if (!points.empty() && !(p.z > points.back().z)) {
            throw FormatError(where + "z values must be strictly increasing");
        }
        if (!points.empty() && !(p.u > points.back().u)) {
            throw FormatError(where + "u values must be strictly increasing");
        }
        points.push_back(p);
    }
    try {
        return TabulatedOcv(std::move(points));
    } catch (const DomainError& e) {
        throw FormatError(source + ": " + e.what());
    }
}

TabulatedOcv load_tabulated_ocv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open OCV table '" + path.string() + "'");
    }
    return parse_tabulated_ocv(in, path.string());
}

}  // namespace pbsim
