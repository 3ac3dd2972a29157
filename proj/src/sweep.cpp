#include "pbsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "pbsim/analytic.hpp"
#include "pbsim/errors.hpp"
#include "pbsim/format.hpp"

namespace pbsim {

Axis::Axis(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw DomainError("sweep axis needs at least two points");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!(values_[k] > 0.0) || !std::isfinite(values_[k])) {
            throw DomainError("sweep axis values must be positive and finite");
        }
        if (k > 0 && !(values_[k] > values_[k - 1])) {
            throw DomainError("sweep axis values must be strictly increasing");
        }
    }
}

Axis Axis::range(double min, double max, std::size_t points, AxisSpacing spacing) {
    if (points < 2) {
        throw DomainError("sweep axis needs at least two points");
    }
    if (!(min > 0.0) || !(max > min)) {
        throw DomainError("sweep axis requires 0 < min < max");
    }
    std::vector<double> v(points);
    const double last = static_cast<double>(points - 1);
    for (std::size_t k = 0; k < points; ++k) {
        const double f = static_cast<double>(k) / last;
        v[k] = spacing == AxisSpacing::log ? min * std::pow(max / min, f) : min + (max - min) * f;
    }
    v.back() = max;
    return Axis(std::move(v));
}

Axis Axis::list(std::vector<double> values) { return Axis(std::move(values)); }

std::string_view to_string(PointStatus status) {
    switch (status) {
        case PointStatus::ok: return "ok";
        case PointStatus::range_error: return "range-error";
        case PointStatus::non_terminated: return "non-terminated";
    }
    return "ok";
}

PackParams pack_at(const CellParams& base_cell, double q, double r) {
    CellParams b(base_cell.capacity_ah / q, base_cell.resistance_ohm / r, base_cell.ocv);
    return PackParams(base_cell, std::move(b));
}

namespace {

struct PointResult {
    double dz;
    double di;
    PointStatus status;
};

PointResult evaluate_point(const SweepSpec& spec, const IntegratorConfig& config, double q,
                           double r) {
    const PackParams pack = pack_at(spec.base_cell, q, r);
    if (std::holds_alternative<AnalyticSteadyState>(spec.mode)) {
        const auto ss = steady_state_map_point(pack, spec.applied_current);
        return {ss.dz_ss, ss.di_ss, PointStatus::ok};
    }
    const auto& sim = std::get<SimulateToVoltage>(spec.mode);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        const auto series = run_cc_until(pack, PackState{0.0, sim.z_a0, sim.z_b0},
                                         spec.applied_current, VoltageReached{sim.v_max}, config);
        return {series.back().delta_z(), series.back().delta_i(), PointStatus::ok};
    } catch (const NonTerminationError&) {
        return {nan, nan, PointStatus::non_terminated};
    } catch (const SocRangeError&) {
        return {nan, nan, PointStatus::range_error};
    } catch (const DomainError&) {
        return {nan, nan, PointStatus::range_error};
    }
}

}  // namespace

SweepGrid run_sweep(const SweepSpec& spec, const IntegratorConfig& config, unsigned jobs) {
    if (!std::isfinite(spec.applied_current)) {
        throw DomainError("sweep current must be finite");
    }
    if (std::holds_alternative<AnalyticSteadyState>(spec.mode)) {
        if (spec.base_cell.ocv.as_affine() == nullptr) {
            throw UnsupportedModelError("analytic sweep requires an affine OCV");
        }
    } else {
        config.validate();
        const auto& sim = std::get<SimulateToVoltage>(spec.mode);
        check_soc(PackState{0.0, sim.z_a0, sim.z_b0});
    }

    SweepGrid grid;
    grid.q = spec.q.values();
    grid.r = spec.r.values();
    const std::size_t total = grid.q.size() * grid.r.size();
    grid.dz.assign(total, 0.0);
    grid.di.assign(total, 0.0);
    grid.status.assign(total, PointStatus::ok);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            const auto res = evaluate_point(spec, config, grid.q[k / grid.r.size()],
                                            grid.r[k % grid.r.size()]);
            grid.dz[k] = res.dz;
            grid.di[k] = res.di;
            grid.status[k] = res.status;
        }
    };

    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    return grid;
}

namespace {

void collect_zeros(const SweepGrid& g, const std::vector<double>& values, std::vector<QrPoint>& out) {
    const std::size_t nq = g.q.size();
    const std::size_t nr = g.r.size();
    auto usable = [&](std::size_t k) { return g.status[k] == PointStatus::ok; };

    for (std::size_t iq = 0; iq < nq; ++iq) {
        for (std::size_t ir = 0; ir < nr; ++ir) {
            const std::size_t k = g.index(iq, ir);
            if (!usable(k)) {
                continue;
            }
            const double v = values[k];
            if (v == 0.0) {
                out.push_back({g.q[iq], g.r[ir]});
                continue;
            }
            // Edge toward larger r.
            if (ir + 1 < nr) {
                const std::size_t k2 = g.index(iq, ir + 1);
                const double v2 = values[k2];
                if (usable(k2) && v2 != 0.0 && (v < 0.0) != (v2 < 0.0)) {
                    const double w = v / (v - v2);
                    out.push_back({g.q[iq], g.r[ir] + w * (g.r[ir + 1] - g.r[ir])});
                }
            }
            // Edge toward larger q.
            if (iq + 1 < nq) {
                const std::size_t k2 = g.index(iq + 1, ir);
                const double v2 = values[k2];
                if (usable(k2) && v2 != 0.0 && (v < 0.0) != (v2 < 0.0)) {
                    const double w = v / (v - v2);
                    out.push_back({g.q[iq] + w * (g.q[iq + 1] - g.q[iq]), g.r[ir]});
                }
            }
        }
    }
}

}  // namespace

ZeroContours zero_contours(const SweepGrid& grid) {
    ZeroContours c;
    collect_zeros(grid, grid.dz, c.dz_zero);
    collect_zeros(grid, grid.di, c.di_zero);
    return c;
}

void write_grid_csv(std::ostream& out, const SweepGrid& grid) {
    out << "q,r,dz,di,status\n";
    for (std::size_t iq = 0; iq < grid.q.size(); ++iq) {
        for (std::size_t ir = 0; ir < grid.r.size(); ++ir) {
            const std::size_t k = grid.index(iq, ir);
            out << format_double(grid.q[iq]) << ',' << format_double(grid.r[ir]) << ','
                << format_double(grid.dz[k]) << ',' << format_double(grid.di[k]) << ','
                << to_string(grid.status[k]) << '\n';
        }
    }
}

nlohmann::json grid_to_json(const SweepGrid& grid) {
    auto matrix = [&](auto&& cell) {
        auto rows = nlohmann::json::array();
        for (std::size_t iq = 0; iq < grid.q.size(); ++iq) {
            auto row = nlohmann::json::array();
            for (std::size_t ir = 0; ir < grid.r.size(); ++ir) {
                row.push_back(cell(grid.index(iq, ir)));
            }
            rows.push_back(std::move(row));
        }
        return rows;
    };
    return {{"q", grid.q},
            {"r", grid.r},
            {"layout", "rows indexed by q, columns by r"},
            {"dz", matrix([&](std::size_t k) { return nlohmann::json(grid.dz[k]); })},
            {"di", matrix([&](std::size_t k) { return nlohmann::json(grid.di[k]); })},
            {"status", matrix([&](std::size_t k) { return nlohmann::json(to_string(grid.status[k])); })}};
}

void write_contours_csv(std::ostream& out, const ZeroContours& contours) {
    out << "curve,q,r\n";
    for (const auto& p : contours.dz_zero) {
        out << "dz," << format_double(p.q) << ',' << format_double(p.r) << '\n';
    }
    for (const auto& p : contours.di_zero) {
        out << "di," << format_double(p.q) << ',' << format_double(p.r) << '\n';
    }
}

}  // namespace pbsim
