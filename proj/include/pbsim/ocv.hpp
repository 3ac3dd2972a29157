#pragma once

// Open-circuit-voltage models U(z) on the SOC window z in [0, 1].
//
// Three kinds are supported: the affine model U(z) = u0 + alpha * z used by
// the closed-form theory, a piecewise-affine model given by breakpoints, and a
// dense tabulated curve interpolated piecewise-linearly. All three are strictly
// increasing. Evaluating outside [0, 1] throws DomainError; there is no
// extrapolation.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace pbsim {

struct OcvPoint {
    double z;  // SOC fraction
    double u;  // volts

    bool operator==(const OcvPoint&) const = default;
};

class AffineOcv {
public:
    AffineOcv(double u0, double alpha);

    double u0() const noexcept { return u0_; }
    double alpha() const noexcept { return alpha_; }

    double evaluate(double z) const;
    double slope_at(double z) const;

    bool operator==(const AffineOcv&) const = default;

private:
    double u0_;
    double alpha_;
};

namespace detail {

// Strictly increasing (z, u) knots spanning z = 0 .. 1 with linear
// interpolation between them. At an interior knot the slope is that of the
// segment to its right; at z = 1 it is the slope of the last segment.
class MonotoneTable {
public:
    MonotoneTable(std::vector<OcvPoint> points, std::string_view what);

    std::span<const OcvPoint> points() const noexcept { return points_; }
    double evaluate(double z) const;
    double slope_at(double z) const;

    bool operator==(const MonotoneTable&) const = default;

private:
    std::size_t segment_index(double z) const;

    std::vector<OcvPoint> points_;
};

}  // namespace detail

class PiecewiseAffineOcv {
public:
    explicit PiecewiseAffineOcv(std::vector<OcvPoint> breakpoints);

    std::span<const OcvPoint> breakpoints() const noexcept { return table_.points(); }
    std::size_t segments() const noexcept { return table_.points().size() - 1; }
    double evaluate(double z) const { return table_.evaluate(z); }
    double slope_at(double z) const { return table_.slope_at(z); }

    bool operator==(const PiecewiseAffineOcv&) const = default;

private:
    detail::MonotoneTable table_;
};

class TabulatedOcv {
public:
    explicit TabulatedOcv(std::vector<OcvPoint> samples);

    std::span<const OcvPoint> samples() const noexcept { return table_.points(); }
    double evaluate(double z) const { return table_.evaluate(z); }
    double slope_at(double z) const { return table_.slope_at(z); }

    bool operator==(const TabulatedOcv&) const = default;

private:
    detail::MonotoneTable table_;
};

// Immutable, cheaply copyable handle to one of the three model kinds. Copies
// share the same underlying instance.
class OcvModel {
public:
    using Variant = std::variant<AffineOcv, PiecewiseAffineOcv, TabulatedOcv>;

    OcvModel(AffineOcv model);
    OcvModel(PiecewiseAffineOcv model);
    OcvModel(TabulatedOcv model);

    double evaluate(double z) const;
    double slope_at(double z) const;

    const Variant& variant() const noexcept { return *impl_; }
    // nullptr unless the model is affine.
    const AffineOcv* as_affine() const noexcept { return std::get_if<AffineOcv>(impl_.get()); }
    std::string_view kind() const noexcept;

    bool same_instance(const OcvModel& other) const noexcept { return impl_ == other.impl_; }
    bool operator==(const OcvModel& other) const;

private:
    std::shared_ptr<const Variant> impl_;
};

inline double evaluate(const OcvModel& model, double z) { return model.evaluate(z); }
inline double slope_at(const OcvModel& model, double z) { return model.slope_at(z); }

struct PiecewiseFit {
    PiecewiseAffineOcv model;
    double max_deviation;  // volts, over every table sample
};

// Minimax piecewise-affine approximation of a tabulated curve. Breakpoints are
// chosen among the table's own z values; the chosen set minimizes the largest
// |table - fit| over all samples. Endpoints are z = 0 and z = 1.
PiecewiseFit fit_piecewise(const TabulatedOcv& table, int n_segments);

// Two-column text table with header `z,u`. Rejects non-monotone data.
TabulatedOcv parse_tabulated_ocv(std::istream& in, std::string_view source_name);
TabulatedOcv load_tabulated_ocv(const std::filesystem::path& path);

}  // namespace pbsim
